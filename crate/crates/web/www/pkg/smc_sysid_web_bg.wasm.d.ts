/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_filterdemo_free: (a: number, b: number) => void;
export const __wbg_likelihoodcurve_free: (a: number, b: number) => void;
export const __wbg_posterior_free: (a: number, b: number) => void;
export const filter_demo: (a: number, b: number, c: number, d: bigint) => [number, number, number];
export const filterdemo_ess: (a: number) => [number, number];
export const filterdemo_kalman_loglik: (a: number) => number;
export const filterdemo_kalman_mean: (a: number) => [number, number];
export const filterdemo_kalman_sd: (a: number) => [number, number];
export const filterdemo_pf_loglik: (a: number) => number;
export const filterdemo_pf_mean: (a: number) => [number, number];
export const filterdemo_y: (a: number) => [number, number];
export const likelihood_curve: (a: number, b: number, c: number, d: bigint, e: number, f: number, g: number) => [number, number, number];
export const likelihoodcurve_estimate: (a: number) => [number, number];
export const likelihoodcurve_exact: (a: number) => [number, number];
export const likelihoodcurve_grid: (a: number) => [number, number];
export const posterior_counts: (a: number) => [number, number];
export const posterior_edges: (a: number) => [number, number];
export const posterior_ess: (a: number) => number;
export const posterior_histogram: (a: number, b: number, c: number, d: number, e: bigint, f: number, g: number, h: number, i: number) => [number, number, number];
export const posterior_mean: (a: number) => number;
export const posterior_sd: (a: number) => number;
export const posterior_trace: (a: number) => [number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
export const __wbindgen_start: () => void;
