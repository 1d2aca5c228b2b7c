/* tslint:disable */
/* eslint-disable */

export class Demo {
    free(): void;
    [Symbol.dispose](): void;
    /**
     * Spectral edge map for an odd window size in {3, 5, 7}.
     */
    edge_rgba(k: number): Uint8Array;
    ground_truth_rgba(): Uint8Array;
    /**
     * `key=value` metric report of saliency map `index` against the ground
     * truth.
     */
    metrics(index: number): string;
    /**
     * A `size × size` disk scene with orthogonal object/background spectra.
     * `size` must be at least 128 for the default eight-layer pyramid.
     */
    constructor(size: number, channels: number, radius: number, noise: number, seed: bigint);
    /**
     * ROC curve as a flat `[fpr0, tpr0, fpr1, tpr1, …]` array.
     */
    roc(index: number): Float64Array;
    saliency_count(): number;
    saliency_rgba(index: number): Uint8Array;
    size(): number;
}

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_demo_free: (a: number, b: number) => void;
    readonly demo_edge_rgba: (a: number, b: number) => [number, number, number, number];
    readonly demo_ground_truth_rgba: (a: number) => [number, number];
    readonly demo_metrics: (a: number, b: number) => [number, number, number, number];
    readonly demo_new: (a: number, b: number, c: number, d: number, e: bigint) => [number, number, number];
    readonly demo_roc: (a: number, b: number) => [number, number, number, number];
    readonly demo_saliency_count: (a: number) => number;
    readonly demo_saliency_rgba: (a: number, b: number) => [number, number, number, number];
    readonly demo_size: (a: number) => number;
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
