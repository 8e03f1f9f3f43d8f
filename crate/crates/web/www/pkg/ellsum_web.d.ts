/* tslint:disable */
/* eslint-disable */

/**
 * Solved planar problem plus the two reference bounds.
 */
export class Demo {
    free(): void;
    [Symbol.dispose](): void;
    alpha_area(alpha: Float64Array): number;
    /**
     * Bounding ellipse for arbitrary positive weights.
     */
    alpha_outline(alpha: Float64Array, n: number): Float64Array;
    mm_alpha(): Float64Array;
    mm_area(): number;
    /**
     * Log-det objective after each MM iteration (the first entry is the start).
     */
    mm_history(): Float64Array;
    mm_outline(n: number): Float64Array;
    /**
     * Random planar problem with `terms` summands.
     */
    constructor(terms: number, seed: number);
    /**
     * Points of the Minkowski sum, drawn from summand boundaries.
     */
    sum_samples(count: number, seed: number): Float64Array;
    /**
     * Outline of each summand, `n + 1` points apiece, concatenated.
     */
    summand_outlines(n: number): Float64Array;
    terms(): number;
    trace_alpha(): Float64Array;
    trace_area(): number;
    trace_outline(n: number): Float64Array;
}

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_demo_free: (a: number, b: number) => void;
    readonly demo_alpha_area: (a: number, b: number, c: number) => [number, number, number];
    readonly demo_alpha_outline: (a: number, b: number, c: number, d: number) => [number, number, number, number];
    readonly demo_mm_alpha: (a: number) => [number, number];
    readonly demo_mm_area: (a: number) => number;
    readonly demo_mm_history: (a: number) => [number, number];
    readonly demo_mm_outline: (a: number, b: number) => [number, number];
    readonly demo_new: (a: number, b: number) => [number, number, number];
    readonly demo_sum_samples: (a: number, b: number, c: number) => [number, number];
    readonly demo_summand_outlines: (a: number, b: number) => [number, number];
    readonly demo_terms: (a: number) => number;
    readonly demo_trace_alpha: (a: number) => [number, number];
    readonly demo_trace_area: (a: number) => number;
    readonly demo_trace_outline: (a: number, b: number) => [number, number];
    readonly __externref_table_alloc: () => number;
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
