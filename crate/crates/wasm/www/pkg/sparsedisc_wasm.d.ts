/* tslint:disable */
/* eslint-disable */

/**
 * Universal check of `𝒯(M)` on the circle for `v`-sparse sums.
 */
export function discretization_check(half_width: number, m: number, mode: string, v: number, seed: number): string;

/**
 * Failure certificate for the `n`-term sine system at the given points.
 */
export function sine_certificate(points: Float64Array, n: number, c1: number): string;

/**
 * WOMP on samples of a random `v`-sparse sum over `n` centered frequencies.
 */
export function womp_trace(n: number, v: number, m: number, t: number, iterations: number, seed: number): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly discretization_check: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number, number];
    readonly sine_certificate: (a: number, b: number, c: number, d: number) => [number, number, number, number];
    readonly womp_trace: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
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
