/** Plain-text QA transcript, byte-compatible with the CLI `ask` output so
 * the two surfaces can be compared directly. */

import type { AnswerDto } from "./types.js";

export function renderTranscript(question: string, answer: AnswerDto): string {
  const lines: string[] = [`question: ${question}`];
  lines.push("contexts:");
  answer.contexts.forEach((hit, i) => {
    lines.push(`  ${i + 1}. ${hit.para_id} score=${hit.score.toFixed(6)}`);
  });
  lines.push("answers:");
  answer.per_context.forEach((ctx, i) => {
    lines.push(`  ${i + 1}. ${ctx.answer}`);
  });
  lines.push(`summary: ${answer.summary}`);
  lines.push(
    `subgraph: nodes=${answer.subgraph.nodes.length} edges=${answer.subgraph.edges.length}`,
  );
  return lines.join("\n") + "\n";
}
