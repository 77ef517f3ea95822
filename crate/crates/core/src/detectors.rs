//! Classification of amplitude profiles into transfer events, time scans, and the
//! ready-made scenarios (directed polygons, hypercube, ordered words).

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extension::MultiIndex;
use crate::scheme::{ordered_word_scheme, trivial_scheme_2};
use crate::walk::{amplitudes, p_values, solve_weights, sweep, AmplitudeProfile, WalkSpec, VANISH_TOL};

pub const PST_TOL: f64 = 1e-8;
pub const FR_TOL: f64 = 1e-6;

/// Tolerance on total probability accepted by [`classify`].
const PROFILE_NORM_TOL: f64 = 1e-8;

/// Objectives below this value at a grid minimum are refined.
const REFINE_THRESHOLD: f64 = 0.05;

const GOLDEN_ITERATIONS: usize = 80;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum EventKind {
    #[serde(rename = "PST")]
    Pst,
    #[serde(rename = "FR")]
    Fr,
    #[serde(rename = "GME")]
    Gme,
    #[serde(rename = "ZT-candidate")]
    ZtCandidate,
    #[serde(rename = "none")]
    None,
}

impl EventKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EventKind::Pst => "PST",
            EventKind::Fr => "FR",
            EventKind::Gme => "GME",
            EventKind::ZtCandidate => "ZT-candidate",
            EventKind::None => "none",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransferEvent {
    #[serde(rename = "t")]
    pub time: f64,
    pub kind: EventKind,
    pub support: Vec<MultiIndex>,
    /// Probability carried by the support.
    pub fidelity: f64,
    /// For PST, `gamma` with site amplitude `exp(i gamma)`; zero otherwise.
    pub phase: f64,
}

/// Smallest set of sites, taken in order of decreasing probability, that carries at
/// least `1 - tol`. One site is PST; two sites each within `tol` of one half are GME;
/// any other proper subset is FR; needing every site is `none`.
pub fn classify(profile: &AmplitudeProfile, tol: f64) -> Result<TransferEvent> {
    let total = profile.total_probability();
    if (total - 1.0).abs() > PROFILE_NORM_TOL {
        return Err(Error::NotNormalized(total));
    }
    let mut ranked: Vec<usize> = (0..profile.sites.len()).collect();
    ranked.sort_by(|&a, &b| profile.sites[b].probability.total_cmp(&profile.sites[a].probability));

    let mut mass = 0.0;
    let mut len = 0;
    for &i in &ranked {
        mass += profile.sites[i].probability;
        len += 1;
        if mass >= 1.0 - tol {
            break;
        }
    }
    let support: Vec<MultiIndex> = ranked[..len].iter().map(|&i| profile.sites[i].beta.clone()).collect();
    let top = &profile.sites[ranked[0]];

    let (kind, support, fidelity, phase) = if len == 1 {
        (EventKind::Pst, support, mass, top.site_amplitude.arg())
    } else if len == 2
        && ranked[..2]
            .iter()
            .all(|&i| (profile.sites[i].probability - 0.5).abs() <= tol)
    {
        (EventKind::Gme, support, mass, 0.0)
    } else if len < profile.sites.len() {
        (EventKind::Fr, support, mass, 0.0)
    } else {
        (EventKind::None, Vec::new(), top.probability, 0.0)
    };
    Ok(TransferEvent {
        time: profile.time,
        kind,
        support,
        fidelity,
        phase,
    })
}

fn sorted_probabilities(profile: &AmplitudeProfile) -> Vec<f64> {
    let mut p: Vec<f64> = profile.sites.iter().map(|s| s.probability).collect();
    p.sort_by(|a, b| b.total_cmp(a));
    p
}

fn pst_objective(spec: &WalkSpec, t: f64) -> f64 {
    1.0 - sorted_probabilities(&amplitudes(spec, t))[0]
}

fn gme_objective(spec: &WalkSpec, t: f64) -> f64 {
    let p = sorted_probabilities(&amplitudes(spec, t));
    match p.as_slice() {
        [a, b, ..] => (a - 0.5).abs() + (b - 0.5).abs(),
        _ => f64::INFINITY,
    }
}

/// Smallest `|p_k| / |X|` over `k`.
fn fr_objective(spec: &WalkSpec, t: f64) -> f64 {
    let scale = spec.base().size() as f64;
    p_values(spec, t).iter().map(|p| p.norm() / scale).fold(f64::INFINITY, f64::min)
}

fn golden_section(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - ratio * (b - a);
    let mut d = a + ratio * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..GOLDEN_ITERATIONS {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - ratio * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + ratio * (b - a);
            fd = f(d);
        }
    }
    (a + b) / 2.0
}

/// Grid points where `values` has a local minimum below the refinement threshold.
fn grid_minima(values: &[f64]) -> Vec<usize> {
    let n = values.len();
    (0..n)
        .filter(|&i| {
            let v = values[i];
            v < REFINE_THRESHOLD
                && (i == 0 || v <= values[i - 1])
                && (i + 1 == n || v <= values[i + 1])
        })
        .collect()
}

fn refine(spec: &WalkSpec, grid: &[f64], i: usize, objective: fn(&WalkSpec, f64) -> f64) -> f64 {
    let lo = grid[i.saturating_sub(1)];
    let hi = grid[(i + 1).min(grid.len() - 1)];
    if hi <= lo {
        return grid[i];
    }
    let t = golden_section(|t| objective(spec, t), lo, hi);
    if objective(spec, t) < objective(spec, grid[i]) {
        t
    } else {
        grid[i]
    }
}

/// PST, GME and FR events along a sorted time grid. Grid minima of the matching
/// objective are refined by golden-section search in the bracketing interval and then
/// classified; FR is reported only where some `p_k` vanishes. Repeated hits of the same
/// event within two grid spacings are merged, keeping the highest fidelity.
pub fn scan(spec: &WalkSpec, t_grid: &[f64], tol: f64) -> Result<Vec<TransferEvent>> {
    if t_grid.is_empty() {
        return Ok(Vec::new());
    }
    if t_grid.windows(2).any(|w| w[1] < w[0]) {
        return Err(Error::InvalidParameter("time grid must be sorted".into()));
    }
    let objectives: [(EventKind, fn(&WalkSpec, f64) -> f64); 3] = [
        (EventKind::Pst, pst_objective),
        (EventKind::Gme, gme_objective),
        (EventKind::Fr, fr_objective),
    ];

    let mut events = Vec::new();
    for (kind, objective) in objectives {
        let values: Vec<f64> = t_grid.par_iter().map(|&t| objective(spec, t)).collect();
        let hits: Vec<TransferEvent> = grid_minima(&values)
            .into_par_iter()
            .filter_map(|i| {
                let t = refine(spec, t_grid, i, objective);
                let event = classify(&amplitudes(spec, t), tol).ok()?;
                let accept = match kind {
                    EventKind::Fr => event.kind == EventKind::Fr && objective(spec, t) <= VANISH_TOL,
                    _ => event.kind == kind,
                };
                accept.then_some(event)
            })
            .collect();
        events.extend(hits);
    }
    events.sort_by(|a, b| a.time.total_cmp(&b.time));

    let spacing = if t_grid.len() > 1 {
        (t_grid[t_grid.len() - 1] - t_grid[0]) / (t_grid.len() - 1) as f64
    } else {
        0.0
    };
    Ok(merge_events(events, 2.0 * spacing))
}

fn merge_events(events: Vec<TransferEvent>, window: f64) -> Vec<TransferEvent> {
    // Events arrive sorted by time; chain each into the latest kept event of the same
    // kind and support when close enough.
    let mut kept: Vec<(TransferEvent, f64)> = Vec::new();
    for e in events {
        let existing = kept
            .iter_mut()
            .rev()
            .find(|(k, _)| k.kind == e.kind && k.support == e.support);
        match existing {
            Some((k, last)) if e.time - *last <= window + 1e-12 => {
                *last = e.time;
                if e.fidelity > k.fidelity {
                    *k = e;
                }
            }
            _ => {
                let t = e.time;
                kept.push((e, t));
            }
        }
    }
    let mut out: Vec<TransferEvent> = kept.into_iter().map(|(e, _)| e).collect();
    out.sort_by(|a, b| a.time.total_cmp(&b.time));
    out
}

/// Sites whose probability stays below `tol` at every grid time. A finite grid cannot
/// prove zero transfer, so these are only candidates.
pub fn zero_transfer_candidates(spec: &WalkSpec, t_grid: &[f64], tol: f64) -> Vec<TransferEvent> {
    let profiles = sweep(spec, t_grid);
    let Some(first) = profiles.first() else {
        return Vec::new();
    };
    let t_end = t_grid[t_grid.len() - 1];
    (0..first.sites.len())
        .filter_map(|i| {
            let peak = profiles.iter().map(|p| p.sites[i].probability).fold(0.0, f64::max);
            (peak < tol).then(|| TransferEvent {
                time: t_end,
                kind: EventKind::ZtCandidate,
                support: vec![first.sites[i].beta.clone()],
                fidelity: peak,
                phase: 0.0,
            })
        })
        .collect()
}

/// `true` unless some `p_k`, `k >= 1`, vanishes while a later one does not.
pub fn cascade_holds(spec: &WalkSpec, t: f64, tol: f64) -> bool {
    let scale = spec.base().size() as f64;
    let vanish: Vec<bool> = p_values(spec, t).iter().map(|p| p.norm() / scale <= tol).collect();
    match (1..vanish.len()).find(|&k| vanish[k]) {
        Some(k) => vanish[k..].iter().all(|&v| v),
        None => true,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExpectedEvent {
    pub time: f64,
    pub kind: EventKind,
    /// Sites the probability must be confined to.
    pub support: Vec<MultiIndex>,
    pub description: String,
}

#[derive(Clone, Debug)]
pub struct Scenario {
    pub label: String,
    pub spec: WalkSpec,
    pub expected_events: Vec<ExpectedEvent>,
    /// End of the natural scan window `[0, horizon]`.
    pub horizon: f64,
}

impl Scenario {
    /// Largest probability found outside the expected support, over all expected events.
    pub fn leakage(&self) -> f64 {
        self.expected_events
            .iter()
            .map(|e| {
                amplitudes(&self.spec, e.time)
                    .sites
                    .iter()
                    .filter(|s| !e.support.contains(&s.beta))
                    .map(|s| s.probability)
                    .sum::<f64>()
            })
            .fold(0.0, f64::max)
    }
}

/// Directed `n`-gon with canonical weights: PST at `tau_k = 2 k pi / n` onto
/// `N e_{(n-k) mod n}` for `k = 1..n`.
pub fn ngon_mpst_scenario(n: usize, copies: usize) -> Result<Scenario> {
    if n < 2 || copies < 1 {
        return Err(Error::InvalidParameter(format!("need n >= 2 and N >= 1, got n={n}, N={copies}")));
    }
    let spec = WalkSpec::canonical_ngon(n, copies)?;
    let expected_events = (1..=n)
        .map(|k| {
            let target = spec.extension().extreme((n - k) % n);
            ExpectedEvent {
                time: 2.0 * k as f64 * PI / n as f64,
                kind: EventKind::Pst,
                description: format!("PST onto {target}"),
                support: vec![target],
            }
        })
        .collect();
    Ok(Scenario {
        label: format!("ngon n={n} N={copies}"),
        spec,
        expected_events,
        horizon: 2.0 * PI,
    })
}

/// Hypercube walk: two-point base, `w_1 = 1`, PST from `(N, 0)` to `(0, N)` at `pi/2`.
pub fn hypercube_pst_scenario(copies: usize) -> Result<Scenario> {
    if copies < 1 {
        return Err(Error::InvalidParameter("need N >= 1".into()));
    }
    let spec = WalkSpec::hermitian(trivial_scheme_2(), copies, vec![Complex64::new(1.0, 0.0)])?;
    let target = spec.extension().extreme(1);
    Ok(Scenario {
        label: format!("hypercube N={copies}"),
        expected_events: vec![ExpectedEvent {
            time: PI / 2.0,
            kind: EventKind::Pst,
            description: format!("PST onto {target}"),
            support: vec![target],
        }],
        spec,
        horizon: PI,
    })
}

/// Time at which the ordered-word scenarios impose their phases.
pub const OW_EVENT_TIME: f64 = PI / 2.0;

/// Phase arguments imposed at [`OW_EVENT_TIME`] by [`ow_fr_scenario`].
pub fn ow_target_args(d: usize, k: usize) -> Result<Vec<f64>> {
    if d < 1 || k > d {
        return Err(Error::InvalidParameter(format!("need 0 <= k <= d and d >= 1; got d={d}, k={k}")));
    }
    Ok((1..=d)
        .map(|l| match k {
            0 if l < d => 2.0 * PI,
            0 => PI,
            _ if l <= d - k + 1 => 2.0 * PI,
            _ => PI / 2.0,
        })
        .collect())
}

/// Ordered words `OW(2, d)` with weights solved so that at `t = pi/2`:
///
/// * `k >= 1`: `z_l = 1` for `l <= d - k + 1` (argument `2 pi`, so the walk is not
///   trivial) and `z_l = i` beyond. Then `p_k = .. = p_d = 0` and the state sits on
///   `{beta : beta_k = .. = beta_d = 0}`.
/// * `k = 0`: `z_l = 1` for `l < d`, `z_d = -1`. Every `p_k` except `p_1` vanishes, so
///   the state is concentrated on `N e_1`.
pub fn ow_fr_scenario(d: usize, copies: usize, k: usize) -> Result<Scenario> {
    if d < 1 || k > d || copies < 1 {
        return Err(Error::InvalidParameter(format!(
            "need 0 <= k <= d, d >= 1, N >= 1; got d={d}, N={copies}, k={k}"
        )));
    }
    let base = ordered_word_scheme(d)?;
    let solution = solve_weights(&base, OW_EVENT_TIME, &ow_target_args(d, k)?)?;
    let spec = WalkSpec::hermitian(base, copies, solution.weights)?;
    let support: Vec<MultiIndex> = if k == 0 {
        vec![spec.extension().extreme(1)]
    } else {
        spec.extension()
            .index_set()
            .iter()
            .filter(|b| b.entries()[k..].iter().all(|&v| v == 0))
            .cloned()
            .collect()
    };
    let (kind, description) = match (k, support.len()) {
        (0, _) => (EventKind::Pst, format!("PST onto {}", support[0])),
        (_, 1) => (EventKind::Pst, format!("revival onto {}", support[0])),
        _ => (EventKind::Fr, format!("FR on beta_{k} = .. = beta_{d} = 0")),
    };
    Ok(Scenario {
        label: format!("ow d={d} N={copies} k={k}"),
        expected_events: vec![ExpectedEvent {
            time: OW_EVENT_TIME,
            kind,
            support,
            description,
        }],
        spec,
        horizon: PI,
    })
}

#[cfg(test)]
mod tests;
