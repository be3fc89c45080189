/* tslint:disable */
/* eslint-disable */

/**
 * g²(0) over `count` equally spaced detunings Δ_q = Δ_m in
 * [`delta_min`, `delta_max`]. Points where g²(0) is undefined or the
 * solver fails come back as NaN.
 */
export function detuning_scan(g_qm: number, omega: number, xi: number, n_th: number, delta_min: number, delta_max: number, count: number): Float64Array;

/**
 * Undriven dressed levels up to `max_excitations`, flattened as
 * `[excitations, energy, excitations, energy, ...]` in units of γ.
 */
export function dressed_levels(delta: number, g_qm: number, max_excitations: number): Float64Array;

/**
 * Single-point g²(0) and ⟨m†m⟩ at detuning `delta`, as `[g2, n, n_max]`.
 */
export function steady_point(delta: number, g_qm: number, omega: number, xi: number, n_th: number): Float64Array;

/**
 * Bose-Einstein occupation of a magnon at `omega_ghz` in a bath at
 * `temperature_mk`.
 */
export function thermal_occupation(omega_ghz: number, temperature_mk: number): number;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly detuning_scan: (a: number, b: number, c: number, d: number, e: number, f: number, g: number) => [number, number, number, number];
    readonly dressed_levels: (a: number, b: number, c: number) => [number, number, number, number];
    readonly steady_point: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
    readonly thermal_occupation: (a: number, b: number) => [number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_start: () => void;
}

export type SyncInitInput = BufferSource | WebAssembly.Module;

/**
 * Instantiates the given `module`, which can either be bytes or
 * a precompiled `WebAssembly.Module`.
 *
 * @param {{ module: SyncInitInput }} module - Passing `SyncInitInput` directly is deprecated.
 *
 * @returns {InitOutput}
 */
export function initSync(module: { module: SyncInitInput } | SyncInitInput): InitOutput;

/**
 * If `module_or_path` is {RequestInfo} or {URL}, makes a request and
 * for everything else, calls `WebAssembly.instantiate` directly.
 *
 * @param {{ module_or_path: InitInput | Promise<InitInput> }} module_or_path - Passing `InitInput` directly is deprecated.
 *
 * @returns {Promise<InitOutput>}
 */
export default function __wbg_init (module_or_path?: { module_or_path: InitInput | Promise<InitInput> } | InitInput | Promise<InitInput>): Promise<InitOutput>;
