/**
 * Training and scoring pipelines over window datasets.
 *
 * Determinism: weight initialisers, the train/validation split and batch
 * order are all seeded; with the single-threaded wasm/cpu backends a
 * given (dataset, config) pair reproduces its loss curve exactly.
 */

import * as tf from '@tensorflow/tfjs';

import { ensureBackend } from './backend.js';
import { Dataset, WindowRecord, splitTrainVal } from './dataset.js';
import { BuiltModel, ModelConfig, buildModel } from './model.js';
import { Rng, deriveSeed } from './rng.js';
import { Histogram, addToHistogram } from './trigger.js';

export class DegenerateLabelsError extends Error {}

export interface TrainMetrics {
  backend: string;
  trainRecords: number;
  valRecords: number;
  valAccuracy: number;
  valLoss: number;
  history: { loss: number[] };
  calibration: Array<{ lo: number; hi: number; count: number; meanPredicted: number; eventRate: number }>;
}

/** Right-pad to maxLen and one-hot encode (slot 0 = padding).

Padding on the right keeps each window's own positions stable while the
position of its final (event-adjacent) element varies across mixed
window lengths, which stops the attention from keying on one absolute
position instead of the trigger content. */
export function tensorsFor(records: WindowRecord[], a: number, maxLen: number) {
  const n = records.length;
  const ids = new Int32Array(n * maxLen);
  const mask = new Float32Array(n * maxLen);
  const labels = new Float32Array(n);
  records.forEach((rec, i) => {
    if (rec.tokens.length > maxLen) {
      throw new RangeError(`window of length ${rec.tokens.length} exceeds maxLen ${maxLen}`);
    }
    rec.tokens.forEach((t, j) => {
      ids[i * maxLen + j] = t + 1;
      mask[i * maxLen + j] = 1;
    });
    labels[i] = rec.label;
  });
  return tf.tidy(() => {
    const idTensor = tf.tensor2d(ids, [n, maxLen], 'int32');
    const oneHot = tf.oneHot(idTensor, a + 1).toFloat();
    return {
      x: tf.keep(oneHot),
      mask: tf.keep(tf.tensor2d(mask, [n, maxLen])),
      y: tf.keep(tf.tensor2d(labels, [n, 1])),
    };
  });
}

export async function trainOnDataset(
  dataset: Dataset,
  config: ModelConfig,
  maxRecords?: number,
): Promise<{ built: BuiltModel; metrics: TrainMetrics }> {
  const backend = await ensureBackend();
  let records = dataset.records;
  if (records.length === 0) throw new DegenerateLabelsError('dataset is empty');
  if (maxRecords !== undefined && records.length > maxRecords) {
    const idx = records.map((_, i) => i);
    new Rng(deriveSeed(config.seed, 17)).shuffle(idx);
    records = idx.slice(0, maxRecords).sort((x, y) => x - y).map((i) => dataset.records[i]);
  }
  const positives = records.filter((r) => r.label === 1).length;
  if (positives === 0 || positives === records.length) {
    throw new DegenerateLabelsError(
      `labels are degenerate: ${positives} positives of ${records.length} records`,
    );
  }
  const { train, val } = splitTrainVal(records, 0.15, Number(deriveSeed(config.seed, 1) & 0xffffffffn));
  const built = buildModel(config, dataset.a, dataset.maxLen);
  built.trainModel.compile({
    optimizer: tf.train.adam(config.learningRate),
    loss: 'binaryCrossentropy',
    metrics: ['accuracy'],
  });
  const trainT = tensorsFor(train, dataset.a, dataset.maxLen);
  const valT = tensorsFor(val, dataset.a, dataset.maxLen);
  const history = await built.trainModel.fit([trainT.x, trainT.mask], trainT.y, {
    epochs: config.epochs,
    batchSize: config.batchSize,
    shuffle: false, // records were pre-shuffled by the seeded split
    verbose: 0,
  });
  const [lossT, accT] = built.trainModel.evaluate([valT.x, valT.mask], valT.y, {
    batchSize: config.batchSize,
  }) as tf.Scalar[];
  const valLoss = (await lossT.data())[0];
  const valAccuracy = (await accT.data())[0];
  const predT = built.trainModel.predict([valT.x, valT.mask]) as tf.Tensor;
  const preds = (await predT.data()) as Float32Array;
  const calibration = calibrationBins(preds, val);
  [trainT, valT].forEach((t) => {
    t.x.dispose();
    t.mask.dispose();
    t.y.dispose();
  });
  lossT.dispose();
  accT.dispose();
  predT.dispose();
  return {
    built,
    metrics: {
      backend,
      trainRecords: train.length,
      valRecords: val.length,
      valAccuracy,
      valLoss,
      history: { loss: (history.history.loss as number[]).map(Number) },
      calibration,
    },
  };
}

function calibrationBins(preds: Float32Array, val: WindowRecord[], bins = 5) {
  const out = [];
  for (let b = 0; b < bins; b++) {
    const lo = b / bins;
    const hi = (b + 1) / bins;
    let count = 0;
    let sumP = 0;
    let sumY = 0;
    preds.forEach((p, i) => {
      if (p >= lo && (p < hi || (b === bins - 1 && p <= hi))) {
        count++;
        sumP += p;
        sumY += val[i].label;
      }
    });
    out.push({
      lo,
      hi,
      count,
      meanPredicted: count ? sumP / count : 0,
      eventRate: count ? sumY / count : 0,
    });
  }
  return out;
}

export interface ScoreOptions {
  k: number;
  positivesOnly: boolean; // default: score only event-causing windows
  batchSize?: number;
}

/** Attention-weight histogram over (by default positive) windows. */
export async function scoreDataset(
  built: BuiltModel,
  records: WindowRecord[],
  opts: ScoreOptions,
): Promise<Histogram> {
  await ensureBackend();
  const subset = opts.positivesOnly ? records.filter((r) => r.label === 1) : records;
  const hist: Histogram = new Map();
  const batch = opts.batchSize ?? 512;
  for (let start = 0; start < subset.length; start += batch) {
    const part = subset.slice(start, start + batch);
    const t = tensorsFor(part, built.a, built.maxLen);
    const [probT, weightsT] = built.attnModel.predict([t.x, t.mask]) as tf.Tensor[];
    const weights = (await weightsT.data()) as Float32Array;
    part.forEach((rec, i) => {
      const w = Array.from(
        weights.slice(i * built.maxLen, i * built.maxLen + rec.tokens.length),
      );
      addToHistogram(hist, rec.tokens, w, opts.k, built.a);
    });
    t.x.dispose();
    t.mask.dispose();
    t.y.dispose();
    probT.dispose();
    weightsT.dispose();
  }
  return hist;
}
