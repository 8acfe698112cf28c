/**
 * Build and run the external trainer invocation.
 *
 * The dataset is validated (and for non-dry runs, re-materialized with the
 * target chat template) before anything is spawned, so a malformed file
 * never reaches the trainer. Dry-run prints the argument set and executes
 * nothing — the test suite and GPU-less environments rely on that.
 */

import { spawnSync } from "node:child_process";
import fs from "node:fs";
import os from "node:os";
import path from "node:path";

import { TrainConfig, writeTrainConfig } from "./configs.js";
import {
  CHAT_TEMPLATES,
  ChatTemplate,
  readInstructionDataset,
  readPreferenceDataset,
  toTrainingText,
} from "./datasets.js";

export interface Invocation {
  command: string;
  args: string[];
}

export interface RunOptions {
  dryRun?: boolean;
  trainerBin?: string;
  chatTemplate?: ChatTemplate;
  workDir?: string;
  /** Existing config file to reference in the argument set; without it the
   * config object is staged into the work directory. */
  configPath?: string;
  /** Injection point for tests; defaults to child_process.spawnSync. */
  spawn?: (command: string, args: string[]) => { status: number | null };
  log?: (line: string) => void;
}

const DEFAULT_TRAINER_BIN = "llm-trainer";

function hyperparamArgs(config: TrainConfig): string[] {
  const args = ["--epochs", String(config.epochs), "--batch-size", String(config.batchSize)];
  if (config.kind === "full_ft") return args;
  args.push(
    "--rank", String(config.rank),
    "--alpha", String(config.alpha),
    "--learning-rate", String(config.learningRate),
    "--scheduler", config.scheduler,
    "--optimizer", config.optimizer,
    "--target-modules", config.targetModules.join(","),
  );
  if (config.kind === "lora_instruct") {
    args.push("--warmup-ratio", String(config.warmupRatio));
  } else {
    args.push("--beta", String(config.beta));
  }
  return args;
}

export function buildInvocation(
  datasetPath: string,
  configPath: string,
  config: TrainConfig,
  options: RunOptions = {}
): Invocation {
  const stage = config.kind === "dpo" ? "dpo" : config.kind === "full_ft" ? "full" : "sft";
  return {
    command: options.trainerBin ?? DEFAULT_TRAINER_BIN,
    args: [
      "--stage", stage,
      "--dataset", datasetPath,
      "--config", configPath,
      ...hyperparamArgs(config),
    ],
  };
}

/**
 * Validate the dataset against the config's expected format, then either
 * print the invocation (dry run) or spawn the trainer and surface its exit
 * status.
 */
export function runTraining(
  datasetPath: string,
  config: TrainConfig,
  options: RunOptions = {}
): { invocation: Invocation; exitStatus: number | null } {
  const log = options.log ?? console.log;
  const template = options.chatTemplate ?? CHAT_TEMPLATES.plain;
  const workDir = options.workDir ?? fs.mkdtempSync(path.join(os.tmpdir(), "scg-train-"));

  let stagedDataset = datasetPath;
  if (config.kind === "dpo") {
    readPreferenceDataset(datasetPath); // format check before invocation
  } else {
    const records = readInstructionDataset(datasetPath);
    if (!options.dryRun) {
      stagedDataset = path.join(workDir, "train.texts.jsonl");
      fs.writeFileSync(
        stagedDataset,
        records
          .map((r) => JSON.stringify({ text: toTrainingText(r, template) }))
          .join("\n") + "\n"
      );
    }
  }

  let configPath = options.configPath;
  if (configPath === undefined) {
    configPath = path.join(workDir, "train.config.json");
    writeTrainConfig(config, configPath);
  }

  const invocation = buildInvocation(stagedDataset, configPath, config, options);
  if (options.dryRun) {
    log(`[dry-run] ${invocation.command} ${invocation.args.join(" ")}`);
    return { invocation, exitStatus: null };
  }

  const spawn =
    options.spawn ??
    ((command: string, args: string[]) => spawnSync(command, args, { stdio: "inherit" }));
  const result = spawn(invocation.command, invocation.args);
  return { invocation, exitStatus: result.status };
}
