/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const bell_demo: (a: number, b: number, c: number, d: number, e: number, f: number, g: bigint) => [number, number];
export const semi_fan: (a: number, b: number, c: bigint, d: number) => [number, number, number, number];
export const two_time_demo: (a: number, b: number, c: number, d: number, e: number, f: bigint) => [number, number];
export const version: () => [number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_start: () => void;
