//! WebAssembly bindings for the static demo page in `www/`.
//!
//! Every export takes plain numbers and returns plain numbers or flat
//! `Float64Array`s, so the page needs no glue beyond the generated module.

use magnon_core::{dressed_spectrum, model, solve_converged, SystemParams};
use wasm_bindgen::prelude::*;

const G2_TOLERANCE: f64 = 1e-3;
const MAX_SCAN_POINTS: usize = 2001;

fn params(g_qm: f64, omega: f64, xi: f64, n_th: f64) -> SystemParams {
    SystemParams {
        g_qm,
        omega_drive: omega,
        xi_probe: xi,
        n_th,
        ..SystemParams::blockade_defaults()
    }
}

/// g²(0) over `count` equally spaced detunings Δ_q = Δ_m in
/// [`delta_min`, `delta_max`]. Points where g²(0) is undefined or the
/// solver fails come back as NaN.
#[wasm_bindgen]
pub fn detuning_scan(
    g_qm: f64,
    omega: f64,
    xi: f64,
    n_th: f64,
    delta_min: f64,
    delta_max: f64,
    count: usize,
) -> Result<Vec<f64>, String> {
    if !(2..=MAX_SCAN_POINTS).contains(&count) {
        return Err(format!("count must lie in 2..={MAX_SCAN_POINTS}, got {count}"));
    }
    if !(delta_min < delta_max) {
        return Err(format!("empty detuning range [{delta_min}, {delta_max}]"));
    }
    let base = params(g_qm, omega, xi, n_th);
    base.validate().map_err(|e| e.to_string())?;
    let step = (delta_max - delta_min) / (count - 1) as f64;
    Ok((0..count)
        .map(|i| {
            let delta = if i + 1 == count {
                delta_max
            } else {
                delta_min + step * i as f64
            };
            solve_converged(&base.with_delta(delta), G2_TOLERANCE)
                .map(|s| s.stats.g2_zero)
                .unwrap_or(f64::NAN)
        })
        .collect())
}

/// Single-point g²(0) and ⟨m†m⟩ at detuning `delta`, as `[g2, n, n_max]`.
#[wasm_bindgen]
pub fn steady_point(delta: f64, g_qm: f64, omega: f64, xi: f64, n_th: f64) -> Result<Vec<f64>, String> {
    let p = params(g_qm, omega, xi, n_th).with_delta(delta);
    let s = solve_converged(&p, G2_TOLERANCE).map_err(|e| e.to_string())?;
    Ok(vec![s.stats.g2_zero, s.stats.mean_number, s.n_max as f64])
}

/// Undriven dressed levels up to `max_excitations`, flattened as
/// `[excitations, energy, excitations, energy, ...]` in units of γ.
#[wasm_bindgen]
pub fn dressed_levels(delta: f64, g_qm: f64, max_excitations: usize) -> Result<Vec<f64>, String> {
    let p = SystemParams {
        g_qm,
        ..SystemParams::blockade_defaults()
            .without_drives()
            .with_delta(delta)
            .with_cutoff(max_excitations.max(2))
    };
    let s = dressed_spectrum(&p).map_err(|e| e.to_string())?;
    Ok(s.blocks
        .iter()
        .filter(|b| b.excitations <= max_excitations)
        .flat_map(|b| b.levels.iter().flat_map(move |&e| [b.excitations as f64, e]))
        .collect())
}

/// Bose-Einstein occupation of a magnon at `omega_ghz` in a bath at
/// `temperature_mk`.
#[wasm_bindgen]
pub fn thermal_occupation(omega_ghz: f64, temperature_mk: f64) -> Result<f64, String> {
    model::thermal_occupation(omega_ghz * 1e9, temperature_mk * 1e-3).map_err(|e| e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scan_shows_blockade_and_bunching() {
        let g2 = detuning_scan(21.0, 0.1, 0.001, 0.0, -30.0, 30.0, 241).unwrap();
        assert_eq!(g2.len(), 241);
        // index 204 is Δ = 21, 179 is Δ = 14.75
        assert!(g2[204] < 1e-2);
        assert!(g2[179] > 1.0);
    }

    #[test]
    fn scan_marks_failures_with_nan() {
        let g2 = detuning_scan(21.0, 0.0, 0.0, 0.0, -1.0, 1.0, 3).unwrap();
        assert!(g2.iter().all(|v| v.is_nan()));
        assert!(detuning_scan(21.0, 0.1, 0.001, 0.0, 1.0, -1.0, 5).is_err());
        assert!(detuning_scan(21.0, 0.1, 0.001, 0.0, -1.0, 1.0, 1).is_err());
        assert!(detuning_scan(-1.0, 0.1, 0.001, 0.0, -1.0, 1.0, 5).is_err());
    }

    #[test]
    fn point_matches_scan() {
        let p = steady_point(21.0, 21.0, 0.1, 0.001, 0.0).unwrap();
        let s = detuning_scan(21.0, 0.1, 0.001, 0.0, 20.0, 21.0, 2).unwrap();
        assert_eq!(p[0], s[1]);
        assert!(p[1] > 0.0);
    }

    #[test]
    fn levels_are_paired() {
        let l = dressed_levels(21.0, 21.0, 2).unwrap();
        // vacuum, two n=1 levels, two n=2 levels
        assert_eq!(l.len(), 10);
        let n2: Vec<f64> = l.chunks(2).filter(|c| c[0] == 2.0).map(|c| c[1]).collect();
        assert!(((n2[1] - n2[0]) / 2.0 - 2f64.sqrt() * 21.0).abs() < 1e-9);
    }

    #[test]
    fn occupation() {
        assert!((thermal_occupation(8.5, 100.0).unwrap() - 0.0172).abs() < 1e-4);
        assert!(thermal_occupation(8.5, 0.0).is_err());
    }
}
