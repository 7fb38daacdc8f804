/**
 * Desk-scale identification matrix: four generator scenarios (a=2,
 * h in {1,4}, l=3), 100k-element streams sliced at window 22, three seeds
 * each. A run passes when the attention-histogram argmax over held-out
 * positive windows equals the ground-truth apparent trigger. Exits 1 on
 * the first failing scenario/seed combination (after printing the table).
 *
 * Datasets come from the workbench CLI (`python3 -m triggerlab windows`);
 * this script talks to it only through files.
 */

import { spawnSync } from 'node:child_process';
import * as fs from 'node:fs';
import * as os from 'node:os';
import * as path from 'node:path';

import { apparentOf, readDataset } from '../src/dataset.js';
import { defaultConfig } from '../src/model.js';
import { histogramRows, identify } from '../src/trigger.js';
import { scoreDataset, trainOnDataset } from '../src/train.js';

const WINDOW = 22;
const TRAIN_LENGTHS = '22,24,26'; // mixed lengths, all at >= 95% confidence
const STREAM_LEN = 100_000;
const SEEDS = [301, 302, 303];
const MAX_TRAIN_RECORDS = 5000;

const SCENARIOS: Array<{ name: string; h: number }> = [
  { name: 'consecutive-nohidden', h: 1 },
  { name: 'consecutive-hidden', h: 4 },
  { name: 'subsequence-nohidden', h: 1 },
  { name: 'subsequence-hidden', h: 4 },
];

function makeDataset(
  dir: string,
  tag: string,
  scenario: string,
  h: number,
  seed: number,
  length: number,
  lengths: string,
  trigger?: string,
): string {
  const out = path.join(dir, `${tag}.jsonl`);
  const args = [
    '-m', 'triggerlab', 'windows',
    '--a', '2', '--h', String(h), '--l', '3',
    '--scenario', scenario,
    '--length', String(length),
    '--seed', String(seed),
    '--window-lengths', lengths,
    '--span-bound', String(WINDOW),
    '--balance', 'downsample', '--negative-ratio', '1.0',
    '--keep-crossing',
    '--out', out,
  ];
  if (trigger) args.push('--trigger', trigger);
  const res = spawnSync('python3', args, { encoding: 'utf-8' });
  if (res.status !== 0) {
    throw new Error(`dataset generation failed: ${res.stderr}`);
  }
  return out;
}

async function runOne(dir: string, scenario: string, h: number, seed: number) {
  const trainPath = makeDataset(dir, `${scenario}-${seed}-train`, scenario, h, seed, STREAM_LEN, TRAIN_LENGTHS);
  const trainSet = readDataset(trainPath);
  const truth = trainSet.truth!;
  const heldOutPath = makeDataset(
    dir,
    `${scenario}-${seed}-test`,
    scenario,
    h,
    seed + 7000,
    Math.floor(STREAM_LEN / 2),
    String(WINDOW),
    truth.trigger,
  );
  const config = { ...defaultConfig, seed };
  const t0 = Date.now();
  const { built, metrics } = await trainOnDataset(trainSet, config, MAX_TRAIN_RECORDS);
  const testSet = readDataset(heldOutPath);
  const hist = await scoreDataset(built, testSet.records, { k: 3, positivesOnly: true });
  const winners = identify(hist);
  const expected = apparentOf(truth.trigger);
  const ok = winners.length === 1 && winners[0] === expected;
  const secs = ((Date.now() - t0) / 1000).toFixed(0);
  const top = histogramRows(hist)
    .slice(0, 3)
    .map(([p, c]) => `${p}:${c}`)
    .join(' ');
  console.log(
    `${ok ? 'PASS' : 'FAIL'}  ${scenario.padEnd(22)} seed ${seed}  trigger ${truth.trigger.padEnd(8)} ` +
      `-> ${winners.join('|')} (expect ${expected})  valAcc ${metrics.valAccuracy.toFixed(3)}  ` +
      `top [${top}]  ${secs}s`,
  );
  built.trainModel.dispose();
  return ok;
}

const dir = fs.mkdtempSync(path.join(os.tmpdir(), 'trigger-id-acceptance-'));
let allOk = true;
for (const { name, h } of SCENARIOS) {
  for (const seed of SEEDS) {
    allOk = (await runOne(dir, name, h, seed)) && allOk;
  }
}
fs.rmSync(dir, { recursive: true, force: true });
console.log(allOk ? 'acceptance: ALL PASS' : 'acceptance: FAILURES PRESENT');
process.exit(allOk ? 0 : 1);
