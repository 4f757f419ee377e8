/* tslint:disable */
/* eslint-disable */

/**
 * Time series of one run, column by column.
 */
export class Series {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    readonly b_norm: Float64Array;
    readonly bz: Float64Array;
    readonly energy: Float64Array;
    readonly entropy: Float64Array;
    /**
     * Accumulated heat.
     */
    readonly heat: Float64Array;
    /**
     * Closed-form total heat, or NaN when there is none.
     */
    readonly heat_expected: number;
    readonly max_first_law_residual: number;
    readonly pass: boolean;
    readonly t: Float64Array;
    /**
     * Accumulated work.
     */
    readonly work: Float64Array;
}

/**
 * Takes `[bx, by, bz, ox, oy, oz, wx, wy, wz]`.
 */
export function coherenceTriple(v: Float64Array): Float64Array;

export function dephasingRun(eps: number, gamma: number, bz: number, t1: number, samples: number): Series;

export function thermalRun(eps: number, gamma: number, nbar: number, bz: number, t1: number, samples: number): Series;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_series_free: (a: number, b: number) => void;
    readonly coherenceTriple: (a: number, b: number) => [number, number, number, number];
    readonly dephasingRun: (a: number, b: number, c: number, d: number, e: number) => [number, number, number];
    readonly series_b_norm: (a: number) => [number, number];
    readonly series_bz: (a: number) => [number, number];
    readonly series_energy: (a: number) => [number, number];
    readonly series_entropy: (a: number) => [number, number];
    readonly series_heat: (a: number) => [number, number];
    readonly series_heat_expected: (a: number) => number;
    readonly series_max_first_law_residual: (a: number) => number;
    readonly series_pass: (a: number) => number;
    readonly series_t: (a: number) => [number, number];
    readonly series_work: (a: number) => [number, number];
    readonly thermalRun: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
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
