import * as fs from 'node:fs';
import * as os from 'node:os';
import * as path from 'node:path';

import * as tf from '@tensorflow/tfjs';
import { afterAll, describe, expect, it } from 'vitest';

import { ensureBackend } from '../src/backend.js';
import { buildModel, defaultConfig, loadModel, saveModel } from '../src/model.js';
import { tensorsFor } from '../src/train.js';

const dir = fs.mkdtempSync(path.join(os.tmpdir(), 'trigger-id-model-'));
afterAll(() => fs.rmSync(dir, { recursive: true, force: true }));

const tinyConfig = { ...defaultConfig, tokenEmbedDim: 4, recurrentWidth: 6, attentionWidth: 5, seed: 3 };

const RECORDS = [
  { tokens: [0, 1, 0, 1, 1], label: 1 as const, offset: 0, n: 5 },
  { tokens: [1, 1, 0], label: 0 as const, offset: 1, n: 3 },
];

describe('model graph', () => {
  it('produces a probability and per-position weights', async () => {
    await ensureBackend();
    const built = buildModel(tinyConfig, 2, 6);
    const t = tensorsFor(RECORDS, 2, 6);
    const [prob, weights] = built.attnModel.predict([t.x, t.mask]) as tf.Tensor[];
    expect(prob.shape).toEqual([2, 1]);
    expect(weights.shape).toEqual([2, 6]);
    const p = await prob.data();
    expect(p[0]).toBeGreaterThan(0);
    expect(p[0]).toBeLessThan(1);
    const w = await weights.data();
    // padded (right) positions of the short window carry ~zero attention
    expect(w[6 + 3]).toBeLessThan(1e-6);
    expect(w[6 + 4]).toBeLessThan(1e-6);
    expect(w[6 + 5]).toBeLessThan(1e-6);
    const sumRow1 = w.slice(6).reduce((x, y) => x + y, 0);
    expect(sumRow1).toBeCloseTo(1, 5);
    [prob, weights, t.x, t.mask, t.y].forEach((x) => x.dispose());
    built.trainModel.dispose();
  });

  it('same seed builds identical weights, different seed differs', async () => {
    await ensureBackend();
    const m1 = buildModel(tinyConfig, 2, 6);
    const m2 = buildModel(tinyConfig, 2, 6);
    const m3 = buildModel({ ...tinyConfig, seed: 4 }, 2, 6);
    const [w1, w2, w3] = [m1, m2, m3].map((m) => m.trainModel.getWeights());
    for (let i = 0; i < w1.length; i++) {
      expect(Array.from(await w1[i].data())).toEqual(Array.from(await w2[i].data()));
    }
    const flat1 = Array.from(await w1[0].data());
    const flat3 = Array.from(await w3[0].data());
    expect(flat1).not.toEqual(flat3);
    [m1, m2, m3].forEach((m) => m.trainModel.dispose());
  });

  it('save/load round-trips predictions exactly', async () => {
    await ensureBackend();
    const built = buildModel(tinyConfig, 2, 6);
    const t = tensorsFor(RECORDS, 2, 6);
    const before = Array.from(
      (await (built.trainModel.predict([t.x, t.mask]) as tf.Tensor).data()) as Float32Array,
    );
    const modelDir = path.join(dir, 'saved');
    await saveModel(modelDir, built);
    expect(fs.existsSync(path.join(modelDir, 'config.json'))).toBe(true);
    const loaded = loadModel(modelDir);
    expect(loaded.a).toBe(2);
    expect(loaded.maxLen).toBe(6);
    const after = Array.from(
      (await (loaded.trainModel.predict([t.x, t.mask]) as tf.Tensor).data()) as Float32Array,
    );
    expect(after).toEqual(before);
    [t.x, t.mask, t.y].forEach((x) => x.dispose());
    built.trainModel.dispose();
    loaded.trainModel.dispose();
  });
});
