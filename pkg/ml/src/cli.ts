#!/usr/bin/env node
/**
 * ml train    --dataset windows.jsonl --out model-dir [--config cfg.json] [--seed N]
 * ml identify --model model-dir --dataset test.jsonl [--k L] [--out hist.csv] [--score-all]
 *
 * Datasets are the workbench's line-delimited window files; the histogram
 * csv (pattern,count) matches the workbench's figure tooling.
 */

import * as fs from 'node:fs';

import yargs from 'yargs';
import { hideBin } from 'yargs/helpers';

import { ensureBackend } from './backend.js';
import { apparentOf, readDataset } from './dataset.js';
import { defaultConfig, loadModel, ModelConfig, saveModel } from './model.js';
import { histogramRows, histogramTotal, identify } from './trigger.js';
import { scoreDataset, trainOnDataset } from './train.js';

function loadConfig(path: string | undefined, seed: number | undefined): ModelConfig {
  const cfg = { ...defaultConfig };
  if (path) Object.assign(cfg, JSON.parse(fs.readFileSync(path, 'utf-8')));
  if (seed !== undefined) cfg.seed = seed;
  return cfg;
}

async function cmdTrain(argv: any): Promise<void> {
  await ensureBackend();
  const config = loadConfig(argv.config, argv.seed);
  const dataset = readDataset(argv.dataset);
  const { built, metrics } = await trainOnDataset(dataset, config, argv.maxRecords);
  await saveModel(argv.out, built);
  process.stdout.write(
    JSON.stringify(
      {
        out: argv.out,
        records: dataset.records.length,
        config,
        valAccuracy: metrics.valAccuracy,
        valLoss: metrics.valLoss,
        finalTrainLoss: metrics.history.loss.at(-1),
        calibration: metrics.calibration,
        backend: metrics.backend,
      },
      null,
      2,
    ) + '\n',
  );
}

async function cmdIdentify(argv: any): Promise<void> {
  await ensureBackend();
  const built = loadModel(argv.model);
  const dataset = readDataset(argv.dataset);
  const k = argv.k ?? dataset.truth?.l ?? 3;
  const hist = await scoreDataset(built, dataset.records, {
    k,
    positivesOnly: !argv.scoreAll,
  });
  const rows = histogramRows(hist);
  if (argv.out) {
    const csv = ['pattern,count', ...rows.map(([p, c]) => `${p},${c}`)].join('\n') + '\n';
    fs.writeFileSync(argv.out, csv);
  }
  const winners = identify(hist);
  const truthApparent = dataset.truth ? apparentOf(dataset.truth.trigger) : null;
  process.stdout.write(
    JSON.stringify(
      {
        identified: winners,
        k,
        scoredWindows: histogramTotal(hist),
        histogram: rows.slice(0, 10),
        truthApparent,
        matchesTruth: truthApparent === null ? null : winners.length === 1 && winners[0] === truthApparent,
      },
      null,
      2,
    ) + '\n',
  );
}

export async function main(args: string[]): Promise<number> {
  try {
    await yargs(args)
      .command(
        'train',
        'train the event classifier on a window dataset',
        (y) =>
          y
            .option('dataset', { type: 'string', demandOption: true })
            .option('out', { type: 'string', demandOption: true })
            .option('config', { type: 'string' })
            .option('seed', { type: 'number' })
            .option('max-records', { type: 'number' }),
        cmdTrain,
      )
      .command(
        'identify',
        'construct trigger candidates from attention weights',
        (y) =>
          y
            .option('model', { type: 'string', demandOption: true })
            .option('dataset', { type: 'string', demandOption: true })
            .option('k', { type: 'number' })
            .option('out', { type: 'string' })
            .option('score-all', { type: 'boolean', default: false }),
        cmdIdentify,
      )
      .demandCommand(1)
      .strict()
      .fail((msg, err) => {
        throw err ?? new Error(msg);
      })
      .parseAsync();
    return 0;
  } catch (e) {
    process.stderr.write(`error: ${(e as Error).message}\n`);
    return 1;
  }
}

const isMain = process.argv[1] && import.meta.url.endsWith(process.argv[1].split('/').pop()!);
if (isMain) {
  main(hideBin(process.argv)).then((code) => process.exit(code));
}
