/* tslint:disable */
/* eslint-disable */

export class FilterDemo {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    readonly ess: Float64Array;
    readonly kalman_loglik: number;
    readonly kalman_mean: Float64Array;
    readonly kalman_sd: Float64Array;
    readonly pf_loglik: number;
    readonly pf_mean: Float64Array;
    readonly y: Float64Array;
}

export class LikelihoodCurve {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    readonly estimate: Float64Array;
    readonly exact: Float64Array;
    readonly grid: Float64Array;
}

export class Posterior {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    readonly counts: Float64Array;
    readonly edges: Float64Array;
    readonly ess: number;
    readonly mean: number;
    readonly sd: number;
    /**
     * Full chain including burn-in.
     */
    readonly trace: Float64Array;
}

/**
 * Bootstrap filter and Kalman filter on one simulated dataset.
 */
export function filter_demo(theta: number, len: number, n: number, seed: bigint): FilterDemo;

/**
 * Exact and particle-filter log-likelihood of θ on a grid.
 */
export function likelihood_curve(theta: number, len: number, n: number, seed: bigint, lo: number, hi: number, points: number): LikelihoodCurve;

/**
 * Posterior histogram of θ; `bins = 0` picks Freedman–Diaconis.
 */
export function posterior_histogram(sampler: string, theta: number, len: number, seed: bigint, n: number, iterations: number, burn_in: number, bins: number): Posterior;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_filterdemo_free: (a: number, b: number) => void;
    readonly __wbg_likelihoodcurve_free: (a: number, b: number) => void;
    readonly __wbg_posterior_free: (a: number, b: number) => void;
    readonly filter_demo: (a: number, b: number, c: number, d: bigint) => [number, number, number];
    readonly filterdemo_ess: (a: number) => [number, number];
    readonly filterdemo_kalman_loglik: (a: number) => number;
    readonly filterdemo_kalman_mean: (a: number) => [number, number];
    readonly filterdemo_kalman_sd: (a: number) => [number, number];
    readonly filterdemo_pf_loglik: (a: number) => number;
    readonly filterdemo_pf_mean: (a: number) => [number, number];
    readonly filterdemo_y: (a: number) => [number, number];
    readonly likelihood_curve: (a: number, b: number, c: number, d: bigint, e: number, f: number, g: number) => [number, number, number];
    readonly likelihoodcurve_estimate: (a: number) => [number, number];
    readonly likelihoodcurve_exact: (a: number) => [number, number];
    readonly likelihoodcurve_grid: (a: number) => [number, number];
    readonly posterior_counts: (a: number) => [number, number];
    readonly posterior_edges: (a: number) => [number, number];
    readonly posterior_ess: (a: number) => number;
    readonly posterior_histogram: (a: number, b: number, c: number, d: number, e: bigint, f: number, g: number, h: number, i: number) => [number, number, number];
    readonly posterior_mean: (a: number) => number;
    readonly posterior_sd: (a: number) => number;
    readonly posterior_trace: (a: number) => [number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
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
