//! Browser bindings for the static demo page in `www/`.
//!
//! Every function returns a JSON string; failures come back as
//! `{"error": "..."}` so the page can show them and native tests can call
//! the same functions.

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use levy_lab::lab::FlightModel;
use levy_lab::path::StepPath;
use levy_lab::rng::{Role, SeedStream};
use levy_lab::skorokhod::{
    check_displacement_bound, d_j1_estimate, d_j2_estimate, d_j32_estimate, reorder_bijection, J32_MAX_CELLS,
};
use levy_lab::walk::{build_flight, MediumMode, Walk};

/// Largest `n` the page may request.
pub const MAX_N: usize = 1 << 16;
/// Points returned for plotting; longer flights are thinned.
const PLOT_POINTS: usize = 2000;

fn respond(result: Result<Value, String>) -> String {
    match result {
        Ok(v) => v.to_string(),
        Err(e) => json!({ "error": e }).to_string(),
    }
}

fn check_n(n: usize) -> Result<(), String> {
    if n == 0 || n > MAX_N {
        return Err(format!("n must be in 1..={MAX_N}"));
    }
    Ok(())
}

/// Rescaled flight `Y_floor(nt) / n^gamma` on `[0, 1]` with Pareto gaps.
#[wasm_bindgen]
pub fn simulate_flight(alpha: f64, p_plus: f64, beta: f64, n: usize, seed: u64) -> String {
    respond((|| {
        check_n(n)?;
        let model = FlightModel::pareto(alpha, p_plus, beta).map_err(|e| e.to_string())?;
        let regime = model.regime().map_err(|e| e.to_string())?;
        let flight =
            build_flight(model.gap, model.jump, n, seed, 0, MediumMode::Auto).map_err(|e| e.to_string())?;
        let norm = (n as f64).powf(regime.gamma);
        let stride = (n + 1).div_ceil(PLOT_POINTS);
        let (t, y): (Vec<f64>, Vec<f64>) = flight
            .targets()
            .iter()
            .enumerate()
            .step_by(stride)
            .map(|(i, v)| (i as f64 / n as f64, v / norm))
            .unzip();
        Ok(json!({ "regime": format!("{:?}", regime.id), "gamma": regime.gamma, "t": t, "y": y }))
    })())
}

/// Distances between `f`, which steps up to 1 at `a` and to 2 at `a + w`
/// before dropping to 0 at `a + 2w`, and `g`, the same plateaus in swapped
/// order. J2 can swap the plateaus by moving time by `w`; J1 cannot reorder
/// them. The J3/2 search is exhaustive, so it is `null` above
/// [`J32_MAX_CELLS`].
#[wasm_bindgen]
pub fn skorokhod_distances(a: f64, w: f64, m: usize, runs: usize) -> String {
    respond((|| {
        if !(m > 0 && m <= 20_000) {
            return Err("m must be in 1..=20000".into());
        }
        if !(a > 0.0 && w > 0.0 && a + 2.0 * w < 1.0) {
            return Err("need a > 0, w > 0 and a + 2w < 1".into());
        }
        let err = |e: levy_lab::Error| e.to_string();
        let jumps = [a, a + w, a + 2.0 * w];
        let f = StepPath::piecewise(0.0, 1.0, &jumps, &[0.0, 1.0, 2.0, 0.0]).map_err(err)?;
        let g = StepPath::piecewise(0.0, 1.0, &jumps, &[0.0, 2.0, 1.0, 0.0]).map_err(err)?;
        let j1 = d_j1_estimate(&f, &g, m).map_err(err)?;
        let j2 = d_j2_estimate(&f, &g, m).map_err(err)?;
        let j32 = if m <= J32_MAX_CELLS { Some(d_j32_estimate(&f, &g, m, runs).map_err(err)?.value) } else { None };
        Ok(json!({ "j1": j1.value, "j2": j2.value, "j32": j32, "slack": j2.slack }))
    })())
}

/// Walk positions `S_i / n`, the same values sorted, and the displacement
/// check for the sorting permutation.
#[wasm_bindgen]
pub fn reorder_demo(alpha: f64, p_plus: f64, n: usize, seed: u64) -> String {
    respond((|| {
        check_n(n)?;
        let model = FlightModel::pareto(alpha, p_plus, 1.5).map_err(|e| e.to_string())?;
        let mu = model.mu().filter(|mu| *mu > 0.0).ok_or("needs alpha > 1 and pplus > 0.5")?;
        let walk = Walk::simulate(model.jump, n, SeedStream::new(seed, 0, Role::Walk)).map_err(|e| e.to_string())?;
        let order = reorder_bijection(&walk, n, 1.0).map_err(|e| e.to_string())?;
        let check = check_displacement_bound(&walk, n, 1.0, mu, alpha).map_err(|e| e.to_string())?;
        let s = walk.positions();
        let original: Vec<f64> = s[..order.cells].iter().map(|&v| v as f64 / n as f64).collect();
        let mut sorted = original.clone();
        sorted.sort_by(f64::total_cmp);
        Ok(json!({
            "original": original,
            "reordered": sorted,
            "max_shift": check.max_shift,
            "bound": check.bound,
            "holds": check.holds,
            "monotone": check.monotone,
        }))
    })())
}
