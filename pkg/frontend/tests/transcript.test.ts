import { readFileSync } from "node:fs";
import { join } from "node:path";

import { describe, expect, it } from "vitest";

import { renderTranscript } from "../src/transcript.js";
import type { AnswerDto } from "../src/types.js";

const fixtureDir = join(__dirname, "fixtures");
const fixture = JSON.parse(readFileSync(join(fixtureDir, "qa.json"), "utf-8")) as {
  question: string;
  answer: AnswerDto;
};
const cliTranscript = readFileSync(join(fixtureDir, "mock_transcript.txt"), "utf-8");

describe("renderTranscript", () => {
  it("is byte-identical to the CLI mock transcript for the shared fixture", () => {
    expect(renderTranscript(fixture.question, fixture.answer)).toBe(cliTranscript);
  });

  it("renders the empty-context shape", () => {
    const answer: AnswerDto = {
      summary: "No relevant context was found in the project documents.",
      per_context: [],
      contexts: [],
      subgraph: { nodes: [], edges: [] },
      prompt_log: [],
    };
    expect(renderTranscript("anything?", answer)).toBe(
      "question: anything?\ncontexts:\nanswers:\n" +
        "summary: No relevant context was found in the project documents.\n" +
        "subgraph: nodes=0 edges=0\n",
    );
  });
});
