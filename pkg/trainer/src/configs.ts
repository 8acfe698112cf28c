/**
 * Training configuration presets and their (de)serialization.
 *
 * Instruction tuning (both response styles) runs rank-256/alpha-256 LoRA for
 * 6 epochs at batch 16, lr 5e-5, cosine schedule with 0.1 warmup, 8-bit
 * AdamW. Preference tuning runs rank-64/alpha-64 for a single epoch at
 * batch 2, lr 5e-6, beta 0.1. The full fine-tune preset is batch 1 for
 * 6 epochs. Target projection matrices are model-specific, so they are a
 * required argument with no default.
 */

import fs from "node:fs";

export type TrainMode = "scg_instruct" | "standard_instruct" | "dpo" | "full_ft";

export interface LoraTrainConfig {
  kind: "lora_instruct";
  mode: "scg_instruct" | "standard_instruct";
  rank: number;
  alpha: number;
  epochs: number;
  batchSize: number;
  learningRate: number;
  scheduler: "cosine";
  warmupRatio: number;
  optimizer: "adamw_8bit";
  targetModules: string[];
}

export interface DpoTrainConfig {
  kind: "dpo";
  mode: "dpo";
  rank: number;
  alpha: number;
  epochs: number;
  batchSize: number;
  learningRate: number;
  scheduler: "cosine";
  beta: number;
  optimizer: "adamw_8bit";
  targetModules: string[];
}

export interface FullFtConfig {
  kind: "full_ft";
  mode: "full_ft";
  epochs: number;
  batchSize: number;
}

export type TrainConfig = LoraTrainConfig | DpoTrainConfig | FullFtConfig;

export interface EmitOptions {
  /** Projection matrices the adapter attaches to, e.g. ["q_proj", "v_proj"].
   * Required for the LoRA-based modes; there is no sensible default. */
  targetModules?: string[];
}

function requireTargetModules(mode: TrainMode, options: EmitOptions): string[] {
  const modules = options.targetModules;
  if (!modules || modules.length === 0) {
    throw new Error(
      `${mode} requires targetModules (the projection matrices to adapt); ` +
        "there is no default"
    );
  }
  return [...modules];
}

export function emitTrainConfig(mode: TrainMode, options: EmitOptions = {}): TrainConfig {
  switch (mode) {
    case "scg_instruct":
    case "standard_instruct":
      return {
        kind: "lora_instruct",
        mode,
        rank: 256,
        alpha: 256,
        epochs: 6,
        batchSize: 16,
        learningRate: 5e-5,
        scheduler: "cosine",
        warmupRatio: 0.1,
        optimizer: "adamw_8bit",
        targetModules: requireTargetModules(mode, options),
      };
    case "dpo":
      return {
        kind: "dpo",
        mode,
        rank: 64,
        alpha: 64,
        epochs: 1,
        batchSize: 2,
        learningRate: 5e-6,
        scheduler: "cosine",
        beta: 0.1,
        optimizer: "adamw_8bit",
        targetModules: requireTargetModules(mode, options),
      };
    case "full_ft":
      return { kind: "full_ft", mode, epochs: 6, batchSize: 1 };
    default:
      throw new Error(`unknown training mode ${String(mode)}`);
  }
}

export function validateTrainConfig(config: TrainConfig): void {
  if (config.epochs < 1 || config.batchSize < 1) {
    throw new Error("epochs and batchSize must be >= 1");
  }
  if (config.kind === "full_ft") return;
  if (config.rank < 1) throw new Error(`rank must be >= 1, got ${config.rank}`);
  if (config.targetModules.length === 0) {
    throw new Error("targetModules must not be empty");
  }
  if (config.kind === "lora_instruct") {
    if (config.warmupRatio < 0 || config.warmupRatio > 1) {
      throw new Error(`warmupRatio must be in [0, 1], got ${config.warmupRatio}`);
    }
  } else if (config.beta <= 0) {
    throw new Error(`beta must be > 0, got ${config.beta}`);
  }
}

export function writeTrainConfig(config: TrainConfig, path: string): void {
  validateTrainConfig(config);
  fs.writeFileSync(path, JSON.stringify(config, Object.keys(config).sort(), 2) + "\n");
}

export function readTrainConfig(path: string): TrainConfig {
  const config = JSON.parse(fs.readFileSync(path, "utf-8")) as TrainConfig;
  validateTrainConfig(config);
  return config;
}
