/** Ontology rule filtering for the relation picker. */

import type { SchemaDto } from "./types.js";

/** Relation names allowed between the two entity types, in rule order,
 * deduplicated. An empty list means the pair cannot be related. */
export function relationOptions(
  schema: SchemaDto,
  headType: string,
  tailType: string,
): string[] {
  const seen = new Set<string>();
  const options: string[] = [];
  for (const [head, relation, tail] of schema.rules) {
    if (head === headType && tail === tailType && !seen.has(relation)) {
      seen.add(relation);
      options.push(relation);
    }
  }
  return options;
}

/** True iff the exact directed triple is allowed. */
export function isAllowed(
  schema: SchemaDto,
  headType: string,
  relation: string,
  tailType: string,
): boolean {
  return schema.rules.some(
    ([head, rel, tail]) => head === headType && rel === relation && tail === tailType,
  );
}
