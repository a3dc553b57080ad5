/**
 * Built-in bridge models.
 *
 * `echo` repeats the last context value at every quantile level; it
 * exists so the harness can validate the whole protocol without any
 * model download. `seasonal_naive` repeats the final week. Wrappers
 * around heavyweight reference implementations register here the same
 * way: a pure function from request to quantile rows.
 */

import type { BridgeRequest } from "./protocol.js";

export type ModelFn = (request: BridgeRequest) => number[][];

function constantRows(request: BridgeRequest, point: number[]): number[][] {
  return request.quantiles.map(() => [...point]);
}

/** Repeat the last context value across the horizon, all levels equal. */
export function echoModel(request: BridgeRequest): number[][] {
  const last = request.context[request.context.length - 1];
  return constantRows(request, new Array(request.horizon).fill(last));
}

/** Repeat the final season block (one week) as a degenerate forecast. */
export function seasonalNaiveModel(request: BridgeRequest): number[][] {
  const season = 7;
  if (request.context.length < season) {
    throw new Error(`seasonal_naive needs at least ${season} context values`);
  }
  const block = request.context.slice(-season);
  const point: number[] = [];
  for (let h = 0; h < request.horizon; h++) {
    point.push(block[h % season]);
  }
  return constantRows(request, point);
}

export const MODELS: ReadonlyMap<string, ModelFn> = new Map([
  ["echo", echoModel],
  ["seasonal_naive", seasonalNaiveModel],
]);
