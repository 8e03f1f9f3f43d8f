/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_demo_free: (a: number, b: number) => void;
export const demo_alpha_area: (a: number, b: number, c: number) => [number, number, number];
export const demo_alpha_outline: (a: number, b: number, c: number, d: number) => [number, number, number, number];
export const demo_mm_alpha: (a: number) => [number, number];
export const demo_mm_area: (a: number) => number;
export const demo_mm_history: (a: number) => [number, number];
export const demo_mm_outline: (a: number, b: number) => [number, number];
export const demo_new: (a: number, b: number) => [number, number, number];
export const demo_sum_samples: (a: number, b: number, c: number) => [number, number];
export const demo_summand_outlines: (a: number, b: number) => [number, number];
export const demo_terms: (a: number) => number;
export const demo_trace_alpha: (a: number) => [number, number];
export const demo_trace_area: (a: number) => number;
export const demo_trace_outline: (a: number, b: number) => [number, number];
export const __externref_table_alloc: () => number;
export const __wbindgen_externrefs: WebAssembly.Table;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;
