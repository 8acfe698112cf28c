/**
 * Readers for the upstream dataset files (see ../docs/formats.md):
 *
 *   instruction records: {"instruction", "input", "output",
 *                         "meta": {"doc_id", "template_id", "mode", "demarcation"}}
 *   preference records:  {"doc_id", "prompt", "chosen", "rejected"}
 *
 * Validation happens before any trainer invocation; errors name the
 * offending line.
 */

import fs from "node:fs";

export interface InstructionRecord {
  instruction: string;
  input: string;
  output: string;
  meta: {
    doc_id: string;
    template_id: number;
    mode: string;
    demarcation: [string, string];
  };
}

export interface PreferenceRecord {
  doc_id: string;
  prompt: string;
  chosen: string;
  rejected: string;
}

export type DatasetKind = "instruction" | "preference";

function parseLines(path: string): Array<{ lineno: number; value: unknown }> {
  const out: Array<{ lineno: number; value: unknown }> = [];
  const lines = fs.readFileSync(path, "utf-8").split("\n");
  lines.forEach((line, i) => {
    if (!line.trim()) return;
    try {
      out.push({ lineno: i + 1, value: JSON.parse(line) });
    } catch (err) {
      throw new Error(`${path}:${i + 1}: malformed JSON: ${String(err)}`);
    }
  });
  return out;
}

function fail(path: string, lineno: number, message: string): never {
  throw new Error(`${path}:${lineno}: ${message}`);
}

export function readInstructionDataset(path: string): InstructionRecord[] {
  return parseLines(path).map(({ lineno, value }) => {
    const record = value as Partial<InstructionRecord>;
    for (const field of ["instruction", "input", "output"] as const) {
      if (typeof record[field] !== "string") {
        fail(path, lineno, `missing or non-string field "${field}"`);
      }
    }
    const meta = record.meta;
    if (!meta || typeof meta !== "object") fail(path, lineno, 'missing "meta" object');
    if (typeof meta.doc_id !== "string") fail(path, lineno, "meta.doc_id must be a string");
    if (!Array.isArray(meta.demarcation) || meta.demarcation.length !== 2) {
      fail(path, lineno, "meta.demarcation must be a [open, open] token pair");
    }
    return record as InstructionRecord;
  });
}

export function readPreferenceDataset(path: string): PreferenceRecord[] {
  return parseLines(path).map(({ lineno, value }) => {
    const record = value as Partial<PreferenceRecord>;
    for (const field of ["doc_id", "prompt", "chosen", "rejected"] as const) {
      if (typeof record[field] !== "string") {
        fail(path, lineno, `missing or non-string field "${field}"`);
      }
    }
    if (record.chosen === record.rejected) {
      fail(path, lineno, "chosen and rejected are identical");
    }
    return record as PreferenceRecord;
  });
}

/** How a target model frames the instruction and response sections. */
export interface ChatTemplate {
  name: string;
  instructionOpen: string;
  responseOpen: string;
  suffix: string;
}

export const CHAT_TEMPLATES: Record<string, ChatTemplate> = {
  plain: {
    name: "plain",
    instructionOpen: "### Instruction:\n",
    responseOpen: "\n### Response:\n",
    suffix: "",
  },
  chatml: {
    name: "chatml",
    instructionOpen: "<|im_start|>user\n",
    responseOpen: "<|im_end|>\n<|im_start|>assistant\n",
    suffix: "<|im_end|>",
  },
};

/**
 * One trainer-ready training string: the dataset's demarcation tokens are
 * replaced by the chat template's section markers.
 */
export function toTrainingText(record: InstructionRecord, template: ChatTemplate): string {
  return (
    `${template.instructionOpen}${record.instruction}\n${record.input}` +
    `${template.responseOpen}${record.output}${template.suffix}`
  );
}
