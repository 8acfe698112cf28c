/**
 * Parameter-count arithmetic for low-rank adaptation of a d-by-k weight
 * matrix: the adapter trains r*(d+k) parameters in place of the full d*k.
 */

export interface ParamCount {
  adapterParams: number;
  fullMatrixParams: number;
  /** Set when r is not small relative to min(d, k); the arithmetic still
   * holds but the low-rank setup stops saving parameters. */
  advisory?: string;
}

export function loraParamCount(d: number, k: number, r: number): ParamCount {
  for (const [name, value] of [["d", d], ["k", k], ["r", r]] as const) {
    if (!Number.isInteger(value) || value < 1) {
      throw new Error(`${name} must be a positive integer, got ${value}`);
    }
  }
  const result: ParamCount = {
    adapterParams: r * (d + k),
    fullMatrixParams: d * k,
  };
  if (r >= Math.min(d, k)) {
    result.advisory = `rank ${r} is not small relative to min(d, k) = ${Math.min(d, k)}`;
  }
  return result;
}
