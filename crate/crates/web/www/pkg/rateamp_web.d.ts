/* tslint:disable */
/* eslint-disable */

/**
 * Mean distance to the exact projection after each sweep, unit set.
 */
export function dykstra_curve(horizon: number, start_std: number, starts: number, sweeps: number, seed: bigint): Float64Array;

/**
 * Vertices `[x0, y0, x1, y1, …]` of the pair set, counter-clockwise: the
 * box clipped by the two rate half-planes.
 */
export function pair_polygon(a: number, r: number, u_prev: number, first: boolean): Float64Array;

/**
 * Projection of `(x, y)` followed by the region index `0..8` (A1, A2, B1, B2, C1..C4).
 */
export function pair_project(a: number, r: number, u_prev: number, first: boolean, x: number, y: number): Float64Array;

export function region_name(index: number): string;

/**
 * Mean `‖u_i − u*‖₂` per iteration: the first `iterations` entries for FGM,
 * the next `iterations` for ADMM.
 */
export function solver_curves(horizon: number, iterations: number, instances: number, rho: number, seed: bigint): Float64Array;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly dykstra_curve: (a: number, b: number, c: number, d: number, e: bigint) => [number, number, number, number];
    readonly pair_polygon: (a: number, b: number, c: number, d: number) => [number, number, number, number];
    readonly pair_project: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number, number];
    readonly region_name: (a: number) => [number, number];
    readonly solver_curves: (a: number, b: number, c: number, d: number, e: bigint) => [number, number, number, number];
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
