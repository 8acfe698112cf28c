/**
 * Trainer-adapter CLI.
 *
 * Usage:
 *   npx tsx src/cli.ts param-count <d> <k> <r>
 *   npx tsx src/cli.ts emit-config --mode scg_instruct --target-modules q_proj,v_proj --out cfg.json
 *   npx tsx src/cli.ts train --dataset data.jsonl --config cfg.json [--dry-run]
 *                            [--trainer-bin llm-trainer] [--chat-template plain|chatml]
 */

import { emitTrainConfig, readTrainConfig, writeTrainConfig, TrainMode } from "./configs.js";
import { CHAT_TEMPLATES } from "./datasets.js";
import { runTraining } from "./invocation.js";
import { loraParamCount } from "./loraMath.js";

function flag(args: string[], name: string): string | undefined {
  const i = args.indexOf(`--${name}`);
  return i >= 0 ? args[i + 1] : undefined;
}

export function main(argv: string[]): number {
  const [command, ...rest] = argv;
  try {
    switch (command) {
      case "param-count": {
        const [d, k, r] = rest.slice(0, 3).map(Number);
        const counts = loraParamCount(d, k, r);
        console.log(
          `adapter parameters: ${counts.adapterParams}, ` +
            `full matrix: ${counts.fullMatrixParams}`
        );
        if (counts.advisory) console.log(`advisory: ${counts.advisory}`);
        return 0;
      }
      case "emit-config": {
        const mode = flag(rest, "mode") as TrainMode | undefined;
        if (!mode) throw new Error("--mode required");
        const modules = flag(rest, "target-modules");
        const config = emitTrainConfig(mode, {
          targetModules: modules ? modules.split(",") : undefined,
        });
        const out = flag(rest, "out");
        if (out) {
          writeTrainConfig(config, out);
          console.log(`wrote ${mode} config to ${out}`);
        } else {
          console.log(JSON.stringify(config, null, 2));
        }
        return 0;
      }
      case "train": {
        const dataset = flag(rest, "dataset");
        const configPath = flag(rest, "config");
        if (!dataset || !configPath) throw new Error("--dataset and --config required");
        const templateName = flag(rest, "chat-template") ?? "plain";
        const template = CHAT_TEMPLATES[templateName];
        if (!template) throw new Error(`unknown chat template ${templateName}`);
        const { exitStatus } = runTraining(dataset, readTrainConfig(configPath), {
          dryRun: rest.includes("--dry-run"),
          trainerBin: flag(rest, "trainer-bin"),
          chatTemplate: template,
          configPath,
        });
        return exitStatus ?? 0;
      }
      default:
        console.error(
          "usage: cli.ts <param-count|emit-config|train> ...  (see file header)"
        );
        return 2;
    }
  } catch (err) {
    console.error(`error: ${err instanceof Error ? err.message : String(err)}`);
    return 1;
  }
}

const invokedDirectly =
  process.argv[1] &&
  (process.argv[1].endsWith("cli.ts") || process.argv[1].endsWith("cli.js"));
if (invokedDirectly) {
  process.exit(main(process.argv.slice(2)));
}
