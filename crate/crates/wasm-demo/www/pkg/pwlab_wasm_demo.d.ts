/* tslint:disable */
/* eslint-disable */

export function bell_demo(x: number, xp: number, y: number, yp: number, points: number, samples: number, seed: bigint): string;

export function semi_fan(ratio: number, samples: number, seed: bigint, keep: number): string;

export function two_time_demo(x: number, xp: number, y: number, y2: number, samples: number, seed: bigint): string;

export function version(): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly bell_demo: (a: number, b: number, c: number, d: number, e: number, f: number, g: bigint) => [number, number];
    readonly semi_fan: (a: number, b: number, c: bigint, d: number) => [number, number, number, number];
    readonly two_time_demo: (a: number, b: number, c: number, d: number, e: number, f: bigint) => [number, number];
    readonly version: () => [number, number];
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
