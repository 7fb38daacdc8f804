/**
 * Seeded pseudo-random numbers (SplitMix64 over BigInt), used for
 * deterministic shuffles, splits and seed derivation. The algorithm
 * matches the data generator's PRNG contract: state advances by the
 * 64-bit golden ratio per draw and the SplitMix64 finalizer scrambles it.
 */

const MASK = (1n << 64n) - 1n;
const GOLDEN = 0x9e3779b97f4a7c15n;
const MIX1 = 0xbf58476d1ce4e5b9n;
const MIX2 = 0x94d049bb133111ebn;
const SPLIT_SALT = 0xa5a5b5b5c5c5d5d5n;

export function mix64(z: bigint): bigint {
  z &= MASK;
  z = ((z ^ (z >> 30n)) * MIX1) & MASK;
  z = ((z ^ (z >> 27n)) * MIX2) & MASK;
  return z ^ (z >> 31n);
}

export function deriveSeed(seed: bigint | number, stream: number): bigint {
  const s = BigInt(seed) & MASK;
  return mix64((s ^ SPLIT_SALT) + BigInt(stream + 1) * GOLDEN);
}

export class Rng {
  private readonly seed: bigint;
  private count = 0n;

  constructor(seed: bigint | number) {
    this.seed = BigInt(seed) & MASK;
  }

  nextU64(): bigint {
    this.count += 1n;
    return mix64(this.seed + this.count * GOLDEN);
  }

  /** Uniform integer in [0, k), unbiased via rejection sampling. */
  randBelow(k: number): number {
    if (k <= 0 || !Number.isInteger(k)) {
      throw new RangeError(`randBelow needs an integer k >= 1, got ${k}`);
    }
    const kk = BigInt(k);
    const limit = (MASK + 1n) - ((MASK + 1n) % kk);
    for (;;) {
      const u = this.nextU64();
      if (u < limit) return Number(u % kk);
    }
  }

  /** In-place Fisher-Yates shuffle. */
  shuffle<T>(xs: T[]): T[] {
    for (let i = xs.length - 1; i > 0; i--) {
      const j = this.randBelow(i + 1);
      [xs[i], xs[j]] = [xs[j], xs[i]];
    }
    return xs;
  }
}
