/**
 * Reading the workbench's window-dataset files.
 *
 * A dataset is line-delimited JSON, one record per line with fields
 * `tokens` (apparent-state indices), `label` (1 iff an event fired right
 * after the window), `offset` and `n`. The ground truth (generator
 * config, rendered trigger, event positions) lives in a sidecar
 * `<stem>.truth.json` next to the observed file and is optional here.
 */

import * as fs from 'node:fs';
import * as path from 'node:path';

import { Rng } from './rng.js';

export interface WindowRecord {
  tokens: number[];
  label: 0 | 1;
  offset: number;
  n: number;
}

export interface GroundTruth {
  a: number;
  h: number;
  l: number;
  scenario: string;
  length: number;
  seed: number;
  spanBound: number | null;
  trigger: string;
  triggerMode: string;
  events: number[];
}

export interface Dataset {
  records: WindowRecord[];
  truth: GroundTruth | null;
  a: number; // apparent alphabet size (from truth, or inferred from tokens)
  maxLen: number;
}

export class DatasetFormatError extends Error {
  constructor(message: string, readonly line?: number) {
    super(line === undefined ? message : `line ${line}: ${message}`);
  }
}

export function truthPath(datasetPath: string): string {
  const parsed = path.parse(datasetPath);
  return path.join(parsed.dir, `${parsed.name}.truth.json`);
}

export function readDataset(datasetPath: string): Dataset {
  const text = fs.readFileSync(datasetPath, 'utf-8');
  const records: WindowRecord[] = [];
  let maxToken = 0;
  let maxLen = 0;
  const lines = text.split('\n');
  for (let i = 0; i < lines.length; i++) {
    const line = lines[i].trim();
    if (!line) continue;
    let obj: any;
    try {
      obj = JSON.parse(line);
    } catch (e) {
      throw new DatasetFormatError(`bad JSON: ${(e as Error).message}`, i + 1);
    }
    if (!Array.isArray(obj.tokens) || (obj.label !== 0 && obj.label !== 1)) {
      throw new DatasetFormatError('record needs tokens[] and label 0/1', i + 1);
    }
    const tokens = obj.tokens.map((t: unknown) => {
      if (typeof t !== 'number' || !Number.isInteger(t) || t < 0) {
        throw new DatasetFormatError(`bad token ${t}`, i + 1);
      }
      return t;
    });
    if (obj.n !== tokens.length) {
      throw new DatasetFormatError(`n field ${obj.n} != token count ${tokens.length}`, i + 1);
    }
    maxToken = Math.max(maxToken, ...tokens, 0);
    maxLen = Math.max(maxLen, tokens.length);
    records.push({ tokens, label: obj.label, offset: obj.offset ?? 0, n: tokens.length });
  }
  let truth: GroundTruth | null = null;
  const tp = truthPath(datasetPath);
  if (fs.existsSync(tp)) {
    const raw = JSON.parse(fs.readFileSync(tp, 'utf-8'));
    truth = {
      a: raw.config.a,
      h: raw.config.h,
      l: raw.config.l,
      scenario: raw.config.scenario,
      length: raw.config.length,
      seed: raw.config.seed,
      spanBound: raw.config.span_bound ?? null,
      trigger: raw.trigger,
      triggerMode: raw.trigger_mode,
      events: raw.events,
    };
  }
  const a = truth ? truth.a : maxToken + 1;
  return { records, truth, a, maxLen };
}

export function letters(a: number): string {
  if (a < 1 || a > 26) throw new RangeError(`letter rendering supports 1 <= a <= 26, got ${a}`);
  return a === 2 ? 'LS' : 'ABCDEFGHIJKLMNOPQRSTUVWXYZ'.slice(0, a);
}

export function renderTokens(tokens: number[], a: number): string {
  const ls = letters(a);
  return tokens.map((t) => ls[t]).join('');
}

/** Apparent projection of a rendered trigger: strip hidden digits / marks. */
export function apparentOf(trigger: string): string {
  return trigger.replace(/[0-9]+|i/g, '');
}

export interface Split {
  train: WindowRecord[];
  val: WindowRecord[];
}

/** Deterministic shuffled split; valFraction of records go to validation. */
export function splitTrainVal(records: WindowRecord[], valFraction: number, seed: number): Split {
  const idx = records.map((_, i) => i);
  new Rng(seed).shuffle(idx);
  const nVal = Math.max(1, Math.round(valFraction * records.length));
  const val = idx.slice(0, nVal).map((i) => records[i]);
  const train = idx.slice(nVal).map((i) => records[i]);
  return { train, val };
}
