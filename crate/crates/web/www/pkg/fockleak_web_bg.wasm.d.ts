/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_ratetable_free: (a: number, b: number) => void;
export const __wbg_spectrum_free: (a: number, b: number) => void;
export const __wbg_zenotable_free: (a: number, b: number) => void;
export const ratetable_actions: (a: number) => [number, number];
export const ratetable_energies: (a: number) => [number, number];
export const ratetable_gamma_by_n: (a: number) => [number, number];
export const ratetable_periods: (a: number) => [number, number];
export const ratetable_transmissions: (a: number) => [number, number];
export const spectrum: (a: number, b: number, c: number) => [number, number, number];
export const spectrum_energies: (a: number) => [number, number];
export const spectrum_initial: (a: number) => [number, number];
export const spectrum_quenched: (a: number) => [number, number];
export const spectrum_x: (a: number) => [number, number];
export const wkb_rates: (a: number, b: number) => [number, number, number];
export const zeno_times: (a: number, b: number) => [number, number, number];
export const zenotable_bosons: (a: number) => [number, number];
export const zenotable_distinguishable: (a: number) => [number, number];
export const zenotable_fermions: (a: number) => [number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_start: () => void;
