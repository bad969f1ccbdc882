//! C ABI over the rescue planner.
//!
//! Every function returns an [`RpStatus`]. On failure a message is stored
//! per thread and can be read with [`rp_last_error`]. Handles are opaque and
//! must be released with their matching `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use rescue_planner::bound::{verify_bound, BoundError, LinearDynamicGraph};
use rescue_planner::graph::{parse_instance, StaticSnapshot};
use rescue_planner::policy::{run_policy_trial, PolicyKind, PolicyParams};
use rescue_planner::ptp::{solve_bnb, solve_dp, PtpSolution};
use rescue_planner::sim::{FarmConfig, FieldPattern};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RpStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Parse = 3,
    Infeasible = 4,
    TooLarge = 5,
    BoundViolated = 6,
    Simulation = 7,
    Panic = 8,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RpPolicy {
    GreedyHr = 0,
    GreedyFtg = 1,
    GreedyCr = 2,
    Gittins = 3,
    Ptp = 4,
}

fn policy_kind(code: u32) -> Option<PolicyKind> {
    Some(match code {
        c if c == RpPolicy::GreedyHr as u32 => PolicyKind::GreedyHr,
        c if c == RpPolicy::GreedyFtg as u32 => PolicyKind::GreedyFtg,
        c if c == RpPolicy::GreedyCr as u32 => PolicyKind::GreedyCr,
        c if c == RpPolicy::Gittins as u32 => PolicyKind::Gittins,
        c if c == RpPolicy::Ptp as u32 => PolicyKind::Ptp,
        _ => return None,
    })
}

/// Opaque static instance.
pub struct RpSnapshot(StaticSnapshot);

/// Opaque solver result.
pub struct RpSolution(PtpSolution);

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct RpBoundReport {
    pub gap: f64,
    pub bound: f64,
    pub static_optimum: f64,
    pub dynamic_optimum: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct RpTrialConfig {
    pub rows: u32,
    pub row_length: u32,
    pub free_margin: u32,
    pub n_robots: u32,
    pub p_min: f64,
    pub p_max: f64,
    /// Field layout, 1 to 5.
    pub field_pattern: u8,
    pub field_seed: u64,
    /// An `RpPolicy` value.
    pub policy: u32,
    pub mu: f64,
    pub gamma_p: f64,
    pub gamma_g: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct RpTrialResult {
    pub completion_time: u64,
    pub working_time: u64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(RpStatus, String);

impl Failure {
    fn new(status: RpStatus, msg: impl ToString) -> Self {
        Self(status, msg.to_string())
    }
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> RpStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            RpStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            RpStatus::Panic
        }
    }
}

fn non_null<T>(p: *const T, what: &str) -> Result<(), Failure> {
    if p.is_null() {
        Err(Failure::new(RpStatus::NullPointer, format!("{what} is null")))
    } else {
        Ok(())
    }
}

fn solve_status(e: rescue_planner::ptp::SolveError) -> Failure {
    use rescue_planner::ptp::SolveError;
    let status = match e {
        SolveError::Infeasible => RpStatus::Infeasible,
        SolveError::TooLarge { .. } => RpStatus::TooLarge,
        _ => RpStatus::InvalidArgument,
    };
    Failure::new(status, e)
}

/// Message for the last failed call on this thread, or null after a
/// successful call. Valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn rp_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Builds a snapshot for `n` robots from `n + 2` rewards and a row-major
/// `(n + 2) * (n + 2)` cost matrix.
///
/// # Safety
/// `rewards` and `costs` must point to that many readable doubles and `out`
/// must be writable.
#[no_mangle]
pub unsafe extern "C" fn rp_snapshot_new(
    n: usize,
    rewards: *const f64,
    costs: *const f64,
    out: *mut *mut RpSnapshot,
) -> RpStatus {
    guard(|| {
        non_null(rewards, "rewards")?;
        non_null(costs, "costs")?;
        non_null(out, "out")?;
        let m = n
            .checked_add(2)
            .ok_or_else(|| Failure::new(RpStatus::InvalidArgument, "n overflows"))?;
        let cells = m
            .checked_mul(m)
            .ok_or_else(|| Failure::new(RpStatus::InvalidArgument, "n overflows"))?;
        let r = std::slice::from_raw_parts(rewards, m).to_vec();
        let c = std::slice::from_raw_parts(costs, cells).to_vec();
        let snap = StaticSnapshot::new(r, c).map_err(|e| Failure::new(RpStatus::InvalidArgument, e))?;
        *out = Box::into_raw(Box::new(RpSnapshot(snap)));
        Ok(())
    })
}

/// Parses a snapshot from instance text.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn rp_snapshot_parse(text: *const c_char, out: *mut *mut RpSnapshot) -> RpStatus {
    guard(|| {
        non_null(text, "text")?;
        non_null(out, "out")?;
        let s = CStr::from_ptr(text)
            .to_str()
            .map_err(|e| Failure::new(RpStatus::Parse, e))?;
        let snap = parse_instance(s).map_err(|e| Failure::new(RpStatus::Parse, e))?;
        *out = Box::into_raw(Box::new(RpSnapshot(snap)));
        Ok(())
    })
}

/// # Safety
/// `snapshot` must come from this library and not be freed twice. Null is
/// ignored.
#[no_mangle]
pub unsafe extern "C" fn rp_snapshot_free(snapshot: *mut RpSnapshot) {
    if !snapshot.is_null() {
        drop(Box::from_raw(snapshot));
    }
}

/// Robot count of a snapshot, or 0 for null.
///
/// # Safety
/// `snapshot` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn rp_snapshot_robot_count(snapshot: *const RpSnapshot) -> usize {
    snapshot.as_ref().map_or(0, |s| s.0.n())
}

unsafe fn solve_with(
    snapshot: *const RpSnapshot,
    out: *mut *mut RpSolution,
    solver: fn(&StaticSnapshot) -> Result<PtpSolution, rescue_planner::ptp::SolveError>,
) -> RpStatus {
    guard(|| {
        non_null(snapshot, "snapshot")?;
        non_null(out, "out")?;
        let sol = solver(&(*snapshot).0).map_err(solve_status)?;
        *out = Box::into_raw(Box::new(RpSolution(sol)));
        Ok(())
    })
}

/// Solves with branch and bound.
///
/// # Safety
/// `snapshot` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn rp_solve_bnb(snapshot: *const RpSnapshot, out: *mut *mut RpSolution) -> RpStatus {
    solve_with(snapshot, out, solve_bnb)
}

/// Solves with subset dynamic programming.
///
/// # Safety
/// `snapshot` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn rp_solve_dp(snapshot: *const RpSnapshot, out: *mut *mut RpSolution) -> RpStatus {
    solve_with(snapshot, out, solve_dp)
}

/// # Safety
/// `solution` must come from this library and not be freed twice. Null is
/// ignored.
#[no_mangle]
pub unsafe extern "C" fn rp_solution_free(solution: *mut RpSolution) {
    if !solution.is_null() {
        drop(Box::from_raw(solution));
    }
}

/// Objective value, or NaN for null.
///
/// # Safety
/// `solution` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn rp_solution_objective(solution: *const RpSolution) -> f64 {
    solution.as_ref().map_or(f64::NAN, |s| s.0.objective)
}

/// Number of vertices on the path, endpoints included; 0 for null.
///
/// # Safety
/// `solution` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn rp_solution_path_len(solution: *const RpSolution) -> usize {
    solution.as_ref().map_or(0, |s| s.0.path.vertices().len())
}

/// Copies the path vertex indices into `buf`.
///
/// # Safety
/// `solution` must be a live handle and `buf` must hold `capacity` entries.
#[no_mangle]
pub unsafe extern "C" fn rp_solution_path(solution: *const RpSolution, buf: *mut usize, capacity: usize) -> RpStatus {
    guard(|| {
        non_null(solution, "solution")?;
        non_null(buf, "buf")?;
        let path = (*solution).0.path.indices();
        if path.len() > capacity {
            return Err(Failure::new(
                RpStatus::InvalidArgument,
                format!("path needs {} entries, buffer holds {capacity}", path.len()),
            ));
        }
        std::slice::from_raw_parts_mut(buf, path.len()).copy_from_slice(&path);
        Ok(())
    })
}

/// Draws a random drifting graph with `n` robots from `seed` and compares
/// its static and dynamic optima against the gap bound. Returns
/// `RP_STATUS_BOUND_VIOLATED` with `out` filled when the bound fails.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rp_verify_bound(
    n: usize,
    alpha: f64,
    beta: f64,
    lambda: f64,
    seed: u64,
    out: *mut RpBoundReport,
) -> RpStatus {
    guard(|| {
        non_null(out, "out")?;
        if ![alpha, beta, lambda].iter().all(|v| v.is_finite() && *v >= 0.0) {
            return Err(Failure::new(
                RpStatus::InvalidArgument,
                "alpha, beta and lambda must be finite and nonnegative",
            ));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let graph = LinearDynamicGraph::random(&mut rng, n, alpha, beta, lambda);
        match verify_bound(&graph, graph.travel_time_bound()) {
            Ok(r) => {
                *out = RpBoundReport {
                    gap: r.gap,
                    bound: r.bound,
                    static_optimum: r.static_optimum,
                    dynamic_optimum: r.dynamic_optimum,
                };
                Ok(())
            }
            Err(BoundError::Violation { gap, bound, instance }) => {
                *out = RpBoundReport {
                    gap,
                    bound,
                    static_optimum: f64::NAN,
                    dynamic_optimum: f64::NAN,
                };
                Err(Failure::new(
                    RpStatus::BoundViolated,
                    format!("gap {gap} exceeds {bound}\n{instance}"),
                ))
            }
            Err(e @ BoundError::TooLarge { .. }) => Err(Failure::new(RpStatus::TooLarge, e)),
            Err(e) => Err(Failure::new(RpStatus::InvalidArgument, e)),
        }
    })
}

/// Default farm and policy settings.
#[no_mangle]
pub extern "C" fn rp_trial_config_default() -> RpTrialConfig {
    let farm = FarmConfig::default();
    let params = PolicyParams::default();
    RpTrialConfig {
        rows: farm.rows as u32,
        row_length: farm.row_length as u32,
        free_margin: farm.free_margin as u32,
        n_robots: farm.n_robots as u32,
        p_min: farm.p_min,
        p_max: farm.p_max,
        field_pattern: farm.field_pattern.id(),
        field_seed: farm.seed,
        policy: RpPolicy::Ptp as u32,
        mu: params.mu,
        gamma_p: params.gamma_p,
        gamma_g: params.gamma_g,
    }
}

/// Runs one closed-loop trial to completion.
///
/// # Safety
/// `config` must be readable and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn rp_run_trial(
    config: *const RpTrialConfig,
    trial_seed: u64,
    out: *mut RpTrialResult,
) -> RpStatus {
    guard(|| {
        non_null(config, "config")?;
        non_null(out, "out")?;
        let c = *config;
        let kind = policy_kind(c.policy)
            .ok_or_else(|| Failure::new(RpStatus::InvalidArgument, format!("unknown policy code {}", c.policy)))?;
        let field_pattern =
            FieldPattern::try_from(c.field_pattern).map_err(|e| Failure::new(RpStatus::InvalidArgument, e))?;
        let farm = FarmConfig {
            rows: c.rows as usize,
            row_length: c.row_length as usize,
            free_margin: c.free_margin as usize,
            n_robots: c.n_robots as usize,
            p_min: c.p_min,
            p_max: c.p_max,
            field_pattern,
            seed: c.field_seed,
        };
        farm.validate()
            .map_err(|e| Failure::new(RpStatus::InvalidArgument, e))?;
        let params = PolicyParams {
            mu: c.mu,
            gamma_p: c.gamma_p,
            gamma_g: c.gamma_g,
        };
        params
            .validate()
            .map_err(|e| Failure::new(RpStatus::InvalidArgument, e))?;
        let outcome =
            run_policy_trial(kind, &params, &farm, trial_seed).map_err(|e| Failure::new(RpStatus::Simulation, e))?;
        *out = RpTrialResult {
            completion_time: outcome.completion_time,
            working_time: outcome.working_time,
        };
        Ok(())
    })
}
