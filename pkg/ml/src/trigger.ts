/**
 * Trigger construction from attention weights: the apparent symbols at
 * the K highest-weight positions of a window, read in position order.
 * Ties break toward the leftmost position. Identification counts the
 * constructed pattern across scored windows and takes the argmax.
 */

import { renderTokens } from './dataset.js';

export function constructTrigger(tokens: number[], weights: number[], k: number): number[] {
  if (weights.length !== tokens.length) {
    throw new RangeError(`weights length ${weights.length} != tokens length ${tokens.length}`);
  }
  if (k < 0 || k > tokens.length) {
    throw new RangeError(`k must be in [0, ${tokens.length}], got ${k}`);
  }
  const order = tokens.map((_, i) => i);
  order.sort((i, j) => (weights[j] !== weights[i] ? weights[j] - weights[i] : i - j));
  const picked = order.slice(0, k).sort((x, y) => x - y);
  return picked.map((i) => tokens[i]);
}

export type Histogram = Map<string, number>;

export function addToHistogram(
  hist: Histogram,
  tokens: number[],
  weights: number[],
  k: number,
  a: number,
): void {
  const key = renderTokens(constructTrigger(tokens, weights, k), a);
  hist.set(key, (hist.get(key) ?? 0) + 1);
}

export function histogramTotal(hist: Histogram): number {
  let total = 0;
  for (const count of hist.values()) total += count;
  return total;
}

/** Argmax patterns; several entries when tied, lexicographic order. */
export function identify(hist: Histogram): string[] {
  let best = -1;
  for (const count of hist.values()) best = Math.max(best, count);
  const winners = [...hist.entries()].filter(([, c]) => c === best).map(([p]) => p);
  return winners.sort();
}

export function histogramRows(hist: Histogram): Array<[string, number]> {
  return [...hist.entries()].sort((x, y) => y[1] - x[1] || (x[0] < y[0] ? -1 : 1));
}
