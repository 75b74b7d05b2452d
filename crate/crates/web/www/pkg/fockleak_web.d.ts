/* tslint:disable */
/* eslint-disable */

export class RateTable {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    readonly actions: Float64Array;
    readonly energies: Float64Array;
    /**
     * Γ of the N-particle state for N = 1..count.
     */
    readonly gamma_by_n: Float64Array;
    readonly periods: Float64Array;
    readonly transmissions: Float64Array;
}

export class Spectrum {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    readonly energies: Float64Array;
    readonly initial: Float64Array;
    readonly quenched: Float64Array;
    readonly x: Float64Array;
}

export class ZenoTable {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    readonly bosons: Float64Array;
    readonly distinguishable: Float64Array;
    readonly fermions: Float64Array;
}

/**
 * Both potentials on `samples` points of [−1, 2] and the lowest `count`
 * levels of the initial well.
 */
export function spectrum(capacity: number, count: number, samples: number): Spectrum;

/**
 * Per-level WKB data; levels without a barrier are reported as NaN.
 */
export function wkb_rates(capacity: number, count: number): RateTable;

/**
 * τ_Z(N) for N = 1..count and α = −1, 0, +1.
 */
export function zeno_times(capacity: number, count: number): ZenoTable;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_ratetable_free: (a: number, b: number) => void;
    readonly __wbg_spectrum_free: (a: number, b: number) => void;
    readonly __wbg_zenotable_free: (a: number, b: number) => void;
    readonly ratetable_actions: (a: number) => [number, number];
    readonly ratetable_energies: (a: number) => [number, number];
    readonly ratetable_gamma_by_n: (a: number) => [number, number];
    readonly ratetable_periods: (a: number) => [number, number];
    readonly ratetable_transmissions: (a: number) => [number, number];
    readonly spectrum: (a: number, b: number, c: number) => [number, number, number];
    readonly spectrum_energies: (a: number) => [number, number];
    readonly spectrum_initial: (a: number) => [number, number];
    readonly spectrum_quenched: (a: number) => [number, number];
    readonly spectrum_x: (a: number) => [number, number];
    readonly wkb_rates: (a: number, b: number) => [number, number, number];
    readonly zeno_times: (a: number, b: number) => [number, number, number];
    readonly zenotable_bosons: (a: number) => [number, number];
    readonly zenotable_distinguishable: (a: number) => [number, number];
    readonly zenotable_fermions: (a: number) => [number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __externref_table_dealloc: (a: number) => void;
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
