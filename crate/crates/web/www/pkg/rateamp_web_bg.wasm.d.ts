/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const dykstra_curve: (a: number, b: number, c: number, d: number, e: bigint) => [number, number, number, number];
export const pair_polygon: (a: number, b: number, c: number, d: number) => [number, number, number, number];
export const pair_project: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number, number];
export const region_name: (a: number) => [number, number];
export const solver_curves: (a: number, b: number, c: number, d: number, e: bigint) => [number, number, number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;
