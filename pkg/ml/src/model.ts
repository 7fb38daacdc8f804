/**
 * The classifier: three added embeddings (token, neighbourhood, sinusoidal
 * position) feed an LSTM over all positions; additive attention pools the
 * LSTM states into one vector and a dense sigmoid head scores the window.
 * The attention weights are exposed as a second output; they are what
 * identifies the trigger (see trigger.ts).
 *
 * Tokens are fed one-hot with slot 0 reserved for left-padding, so windows
 * of mixed lengths share one graph; padded positions are masked out of the
 * attention softmax.
 */

import * as fs from 'node:fs';
import * as path from 'node:path';

import * as tf from '@tensorflow/tfjs';

export interface ModelConfig {
  tokenEmbedDim: number;
  contextRadius: number;
  positionalEncoding: 'sinusoidal';
  recurrentWidth: number;
  attentionWidth: number;
  /** Chance of hiding a whole position's state from the attention during
   * training; forces the score mass onto every informative position
   * instead of the single completion state. */
  positionDropout: number;
  /** Train-time dropout on the LSTM's recurrent connections. Nonzero
   * values localize the states, which anchors attention to the trigger
   * elements when the per-position evidence is weak. */
  recurrentDropout: number;
  epochs: number;
  batchSize: number;
  learningRate: number;
  seed: number;
}

export const defaultConfig: ModelConfig = {
  tokenEmbedDim: 16,
  contextRadius: 1,
  positionalEncoding: 'sinusoidal',
  recurrentWidth: 24,
  attentionWidth: 32,
  positionDropout: 0.3,
  recurrentDropout: 0,
  epochs: 16,
  batchSize: 256,
  learningRate: 0.01,
  seed: 1,
};

export interface BuiltModel {
  trainModel: tf.LayersModel; // outputs: event probability
  attnModel: tf.LayersModel; // outputs: [event probability, attention weights]
  config: ModelConfig;
  a: number;
  maxLen: number;
}

class SinusoidalPositionEncoding extends tf.layers.Layer {
  static className = 'SinusoidalPositionEncoding';
  private encoding!: tf.Tensor;

  build(inputShape: tf.Shape | tf.Shape[]) {
    const shape = (Array.isArray(inputShape[0]) ? inputShape[0] : inputShape) as tf.Shape;
    const [, length, dModel] = shape as [number, number, number];
    this.encoding = tf.tidy(() => {
      const position = tf.range(0, length, 1).expandDims(1); // [L, 1]
      const divTerm = tf.exp(
        tf.mul(tf.range(0, dModel, 2).div(dModel), tf.scalar(-Math.log(10000.0))),
      );
      const angles = tf.matMul(position.toFloat(), divTerm.expandDims(0)); // [L, d/2]
      return tf.keep(tf.concat([tf.sin(angles), tf.cos(angles)], 1).expandDims(0));
    });
    this.built = true;
  }

  call(inputs: tf.Tensor | tf.Tensor[]): tf.Tensor {
    const input = Array.isArray(inputs) ? inputs[0] : inputs;
    return tf.add(input, this.encoding);
  }

  dispose() {
    this.encoding?.dispose();
    return super.dispose();
  }
}
tf.serialization.registerClass(SinusoidalPositionEncoding);

/**
 * Additive attention pooling. Inputs [states (B,L,D), mask (B,L)];
 * outputs [pooled (B,D), weights (B,L)]. Padded positions get a large
 * negative score before the softmax.
 */
class AdditiveAttentionPool extends tf.layers.Layer {
  static className = 'AdditiveAttentionPool';
  private w1!: tf.LayerVariable;
  private b1!: tf.LayerVariable;
  private v!: tf.LayerVariable;

  constructor(private readonly units: number, private readonly seed: number, config?: any) {
    super(config ?? {});
  }

  build(inputShape: tf.Shape | tf.Shape[]) {
    const statesShape = (inputShape as tf.Shape[])[0];
    const d = statesShape[2] as number;
    this.w1 = this.addWeight(
      'w1',
      [d, this.units],
      'float32',
      tf.initializers.glorotUniform({ seed: this.seed }),
    );
    this.b1 = this.addWeight('b1', [this.units], 'float32', tf.initializers.zeros());
    this.v = this.addWeight(
      'v',
      [this.units, 1],
      'float32',
      tf.initializers.glorotUniform({ seed: this.seed + 1 }),
    );
    this.built = true;
  }

  override computeOutputShape(inputShape: tf.Shape | tf.Shape[]): tf.Shape[] {
    const [statesShape, maskShape] = inputShape as tf.Shape[];
    return [
      [statesShape[0], statesShape[2]],
      [maskShape[0], maskShape[1]],
    ];
  }

  override call(inputs: tf.Tensor | tf.Tensor[]): tf.Tensor[] {
    const [states, mask] = inputs as tf.Tensor[];
    return tf.tidy(() => {
      const hidden = tf.tanh(
        tf.add(tf.matMul(states, this.w1.read().expandDims(0).tile([states.shape[0], 1, 1])),
               this.b1.read()),
      ); // [B, L, units]
      const scores = tf
        .matMul(hidden, this.v.read().expandDims(0).tile([states.shape[0], 1, 1]))
        .squeeze([2]); // [B, L]
      const masked = tf.add(scores, tf.mul(tf.sub(1, mask), tf.scalar(-1e9)));
      const weights = tf.softmax(masked, 1); // [B, L]
      const pooled = tf.sum(tf.mul(states, weights.expandDims(2)), 1); // [B, D]
      return [pooled, weights];
    });
  }
}
tf.serialization.registerClass(AdditiveAttentionPool);

export function buildModel(config: ModelConfig, a: number, maxLen: number): BuiltModel {
  const vocab = a + 1; // slot 0 is padding
  const d = config.tokenEmbedDim;
  const seed = config.seed;
  const oneHot = tf.input({ shape: [maxLen, vocab], name: 'tokens_onehot' });
  const mask = tf.input({ shape: [maxLen], name: 'pad_mask' });

  const tokenEmbed = tf.layers
    .dense({
      units: d,
      useBias: false,
      name: 'token_embedding',
      kernelInitializer: tf.initializers.glorotUniform({ seed }),
    })
    .apply(oneHot) as tf.SymbolicTensor;

  const neighbourEmbed = tf.layers
    .dense({
      units: d,
      useBias: false,
      name: 'neighbour_embedding',
      kernelInitializer: tf.initializers.glorotUniform({ seed: seed + 1 }),
    })
    .apply(oneHot) as tf.SymbolicTensor;
  const context = tf.layers
    .averagePooling1d({
      poolSize: 2 * config.contextRadius + 1,
      strides: 1,
      padding: 'same',
      name: 'neighbourhood_average',
    })
    .apply(neighbourEmbed) as tf.SymbolicTensor;

  const summed = tf.layers.add({ name: 'embeddings_sum' }).apply([tokenEmbed, context]) as tf.SymbolicTensor;
  const positioned = new SinusoidalPositionEncoding({ name: 'position_encoding' }).apply(
    summed,
  ) as tf.SymbolicTensor;

  // Bidirectional so the state at a trigger's first element already
  // reflects the completion to its right; with a causal encoder the
  // attention has no reason to visit that element at all.
  const states = tf.layers
    .bidirectional({
      layer: tf.layers.lstm({
        units: config.recurrentWidth,
        returnSequences: true,
        recurrentDropout: config.recurrentDropout || undefined,
        kernelInitializer: tf.initializers.glorotUniform({ seed: seed + 2 }),
        recurrentInitializer: tf.initializers.glorotUniform({ seed: seed + 3 }),
      }) as tf.RNN,
      mergeMode: 'concat',
      name: 'recurrent_encoder',
    })
    .apply(positioned) as tf.SymbolicTensor;

  const dropped = tf.layers
    .dropout({
      rate: config.positionDropout,
      noiseShape: [1, maxLen, 1],
      seed: seed + 6,
      name: 'position_dropout',
    })
    .apply(states) as tf.SymbolicTensor;

  const [pooled, weights] = new AdditiveAttentionPool(config.attentionWidth, seed + 4, {
    name: 'additive_attention',
  }).apply([dropped, mask]) as tf.SymbolicTensor[];

  const prob = tf.layers
    .dense({
      units: 1,
      activation: 'sigmoid',
      name: 'event_probability',
      kernelInitializer: tf.initializers.glorotUniform({ seed: seed + 5 }),
    })
    .apply(pooled) as tf.SymbolicTensor;

  const trainModel = tf.model({ inputs: [oneHot, mask], outputs: prob });
  const attnModel = tf.model({ inputs: [oneHot, mask], outputs: [prob, weights] });
  return { trainModel, attnModel, config, a, maxLen };
}

/**
 * Save to a self-describing directory: config.json carries the model
 * configuration, alphabet, window length and weight shapes; weights.bin
 * carries the raw float32 data in getWeights() order.
 */
export async function saveModel(dir: string, built: BuiltModel): Promise<void> {
  fs.mkdirSync(dir, { recursive: true });
  const weights = built.trainModel.getWeights();
  const specs = weights.map((w) => ({ shape: w.shape, dtype: w.dtype }));
  const datas = await Promise.all(weights.map((w) => w.data()));
  const total = datas.reduce((s, d) => s + d.length, 0);
  const flat = new Float32Array(total);
  let at = 0;
  for (const d of datas) {
    flat.set(d as Float32Array, at);
    at += d.length;
  }
  fs.writeFileSync(
    path.join(dir, 'config.json'),
    JSON.stringify(
      { format: 1, config: built.config, a: built.a, maxLen: built.maxLen, weights: specs },
      null,
      2,
    ),
  );
  fs.writeFileSync(path.join(dir, 'weights.bin'), Buffer.from(flat.buffer));
}

export function loadModel(dir: string): BuiltModel {
  const meta = JSON.parse(fs.readFileSync(path.join(dir, 'config.json'), 'utf-8'));
  const built = buildModel(meta.config, meta.a, meta.maxLen);
  const raw = fs.readFileSync(path.join(dir, 'weights.bin'));
  const flat = new Float32Array(raw.buffer, raw.byteOffset, raw.byteLength / 4);
  const tensors: tf.Tensor[] = [];
  let at = 0;
  for (const spec of meta.weights) {
    const size = spec.shape.reduce((x: number, y: number) => x * y, 1);
    tensors.push(tf.tensor(flat.slice(at, at + size), spec.shape, spec.dtype));
    at += size;
  }
  built.trainModel.setWeights(tensors);
  tensors.forEach((t) => t.dispose());
  return built;
}
