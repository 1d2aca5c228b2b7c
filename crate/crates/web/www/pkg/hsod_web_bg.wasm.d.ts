/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_demo_free: (a: number, b: number) => void;
export const demo_edge_rgba: (a: number, b: number) => [number, number, number, number];
export const demo_ground_truth_rgba: (a: number) => [number, number];
export const demo_metrics: (a: number, b: number) => [number, number, number, number];
export const demo_new: (a: number, b: number, c: number, d: number, e: bigint) => [number, number, number];
export const demo_roc: (a: number, b: number) => [number, number, number, number];
export const demo_saliency_count: (a: number) => number;
export const demo_saliency_rgba: (a: number, b: number) => [number, number, number, number];
export const demo_size: (a: number) => number;
export const __wbindgen_externrefs: WebAssembly.Table;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;
