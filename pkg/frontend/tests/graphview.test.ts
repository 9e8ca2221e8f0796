import { describe, expect, it } from "vitest";

import { DEFAULT_LAYOUT, entityTypeColors, layoutGraph, mulberry32 } from "../src/graphview.js";
import type { SubgraphDto } from "../src/types.js";

function subgraph(): SubgraphDto {
  return {
    nodes: [
      { node_id: "e1", kind: "ENTITY", props: { entity_type: "CODE", surface: "AB12" } },
      { node_id: "e2", kind: "ENTITY", props: { entity_type: "QTY", surface: "4410" } },
      { node_id: "e3", kind: "ENTITY", props: { entity_type: "QTY", surface: "9001" } },
    ],
    edges: [
      { edge_id: "x", kind: "activates", src: "e1", dst: "e2" },
      { edge_id: "y", kind: "activates", src: "e1", dst: "e3" },
    ],
  };
}

describe("mulberry32", () => {
  it("yields a stable sequence for a seed", () => {
    const a = mulberry32(42);
    const b = mulberry32(42);
    const seqA = [a(), a(), a()];
    const seqB = [b(), b(), b()];
    expect(seqA).toEqual(seqB);
    expect(seqA.every((v) => v >= 0 && v < 1)).toBe(true);
  });
});

describe("layoutGraph", () => {
  it("is deterministic for a fixed seed", () => {
    const first = layoutGraph(subgraph());
    const second = layoutGraph(subgraph());
    expect([...first.entries()]).toEqual([...second.entries()]);
  });

  it("changes with the seed", () => {
    const a = layoutGraph(subgraph(), { ...DEFAULT_LAYOUT, seed: 1 });
    const b = layoutGraph(subgraph(), { ...DEFAULT_LAYOUT, seed: 2 });
    expect([...a.entries()]).not.toEqual([...b.entries()]);
  });

  it("keeps every node inside the viewport padding", () => {
    const positions = layoutGraph(subgraph());
    for (const point of positions.values()) {
      expect(point.x).toBeGreaterThanOrEqual(0);
      expect(point.x).toBeLessThanOrEqual(DEFAULT_LAYOUT.width);
      expect(point.y).toBeGreaterThanOrEqual(0);
      expect(point.y).toBeLessThanOrEqual(DEFAULT_LAYOUT.height);
    }
  });

  it("handles the empty graph", () => {
    expect(layoutGraph({ nodes: [], edges: [] }).size).toBe(0);
  });
});

describe("entityTypeColors", () => {
  it("assigns one stable color per type, alphabetically", () => {
    const colors = entityTypeColors(subgraph().nodes);
    expect([...colors.keys()]).toEqual(["CODE", "QTY"]);
    expect(colors.get("CODE")).not.toBe(colors.get("QTY"));
    expect(entityTypeColors(subgraph().nodes)).toEqual(colors);
  });
});
