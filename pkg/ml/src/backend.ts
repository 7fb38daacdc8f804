import * as tf from '@tensorflow/tfjs';
import { setWasmPaths } from '@tensorflow/tfjs-backend-wasm';
import { createRequire } from 'node:module';
import { dirname } from 'node:path';

let ready: Promise<string> | null = null;

/** Activate the fastest available backend (wasm, else plain cpu). */
export function ensureBackend(): Promise<string> {
  if (!ready) {
    ready = (async () => {
      try {
        const require = createRequire(import.meta.url);
        const wasmDir = dirname(
          require.resolve('@tensorflow/tfjs-backend-wasm/dist/tfjs-backend-wasm.wasm'),
        );
        setWasmPaths(wasmDir + '/');
        if (await tf.setBackend('wasm')) {
          await tf.ready();
          return tf.getBackend();
        }
      } catch {
        // fall through to cpu
      }
      await tf.setBackend('cpu');
      await tf.ready();
      return tf.getBackend();
    })();
  }
  return ready;
}
