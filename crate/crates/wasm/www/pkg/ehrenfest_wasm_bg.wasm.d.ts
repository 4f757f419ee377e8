/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_series_free: (a: number, b: number) => void;
export const coherenceTriple: (a: number, b: number) => [number, number, number, number];
export const dephasingRun: (a: number, b: number, c: number, d: number, e: number) => [number, number, number];
export const series_b_norm: (a: number) => [number, number];
export const series_bz: (a: number) => [number, number];
export const series_energy: (a: number) => [number, number];
export const series_entropy: (a: number) => [number, number];
export const series_heat: (a: number) => [number, number];
export const series_heat_expected: (a: number) => number;
export const series_max_first_law_residual: (a: number) => number;
export const series_pass: (a: number) => number;
export const series_t: (a: number) => [number, number];
export const series_work: (a: number) => [number, number];
export const thermalRun: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;
