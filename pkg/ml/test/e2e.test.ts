/**
 * End-to-end: a dataset produced by the workbench CLI, a short training
 * run, and attention-based identification recovering the true trigger.
 * Kept at a size that trains in well under a minute on the wasm backend.
 */

import { spawnSync } from 'node:child_process';
import * as fs from 'node:fs';
import * as os from 'node:os';
import * as path from 'node:path';

import { afterAll, describe, expect, it } from 'vitest';

import { apparentOf, readDataset } from '../src/dataset.js';
import { defaultConfig } from '../src/model.js';
import { identify } from '../src/trigger.js';
import { DegenerateLabelsError, scoreDataset, trainOnDataset } from '../src/train.js';

const dir = fs.mkdtempSync(path.join(os.tmpdir(), 'trigger-id-e2e-'));
afterAll(() => fs.rmSync(dir, { recursive: true, force: true }));

function generate(tag: string, seed: number, lengths: string, trigger?: string): string {
  const out = path.join(dir, `${tag}.jsonl`);
  const args = [
    '-m', 'triggerlab', 'windows',
    '--a', '2', '--h', '1', '--l', '3',
    '--scenario', 'consecutive-nohidden',
    '--length', '30000',
    '--seed', String(seed),
    '--window-lengths', lengths,
    '--span-bound', '12',
    '--balance', 'downsample', '--negative-ratio', '1.0',
    '--keep-crossing',
    '--out', out,
  ];
  if (trigger) args.push('--trigger', trigger);
  const res = spawnSync('python3', args, { encoding: 'utf-8' });
  expect(res.status, res.stderr).toBe(0);
  return out;
}

describe('end to end on generated data', () => {
  it('learns the event rule and identifies the trigger', { timeout: 300_000 }, async () => {
    const trainPath = generate('train', 501, '12,14,16,18');
    const dataset = readDataset(trainPath);
    const truth = dataset.truth!;
    const config = { ...defaultConfig, seed: 501 };
    const { built, metrics } = await trainOnDataset(dataset, config, 3000);
    expect(metrics.valAccuracy).toBeGreaterThan(0.95);

    const heldOut = readDataset(generate('test', 777, '12', truth.trigger));
    const hist = await scoreDataset(built, heldOut.records, { k: 3, positivesOnly: true });
    const winners = identify(hist);
    expect(winners).toEqual([apparentOf(truth.trigger)]);
    built.trainModel.dispose();
  });

  it('rejects label-degenerate datasets', async () => {
    const p = path.join(dir, 'flat.jsonl');
    fs.writeFileSync(
      p,
      Array.from({ length: 20 }, (_, i) => `{"tokens":[0,1,0],"label":0,"offset":${i},"n":3}`).join(
        '\n',
      ) + '\n',
    );
    await expect(trainOnDataset(readDataset(p), defaultConfig)).rejects.toThrow(
      DegenerateLabelsError,
    );
  });
});
