/** Review-queue logic for auto-annotations pending human revision. */

import type { AnnotationSetDto, EditDto, EntityDto, RelationDto } from "./types.js";

export interface PendingItem {
  kind: "entity" | "relation";
  ann_id: string;
  label: string;
  detail: string;
}

/** Items of a model/regex layer that are not yet mirrored in the human
 * layer (entities matched by (para, span, type); relations by typed
 * endpoint spans). */
export function pendingItems(
  layer: AnnotationSetDto,
  human: AnnotationSetDto,
): PendingItem[] {
  const humanEntityKeys = new Set(human.entities.map(entityKey));
  const entityById = new Map(layer.entities.map((e) => [e.ann_id, e]));
  const humanRelationKeys = new Set(
    human.relations.map((r) => relationKey(r, new Map(human.entities.map((e) => [e.ann_id, e])))),
  );

  const items: PendingItem[] = [];
  for (const entity of layer.entities) {
    if (!humanEntityKeys.has(entityKey(entity))) {
      items.push({
        kind: "entity",
        ann_id: entity.ann_id,
        label: entity.entity_type,
        detail: `"${entity.surface}" [${entity.span[0]}, ${entity.span[1]})`,
      });
    }
  }
  for (const relation of layer.relations) {
    if (!humanRelationKeys.has(relationKey(relation, entityById))) {
      const head = entityById.get(relation.arg1);
      const tail = entityById.get(relation.arg2);
      items.push({
        kind: "relation",
        ann_id: relation.ann_id,
        label: relation.relation_type,
        detail: `"${head?.surface ?? relation.arg1}" -> "${tail?.surface ?? relation.arg2}"`,
      });
    }
  }
  return items;
}

function entityKey(entity: EntityDto): string {
  return `${entity.para_id}|${entity.span[0]}|${entity.span[1]}|${entity.entity_type}`;
}

function relationKey(relation: RelationDto, entities: Map<string, EntityDto>): string {
  const head = entities.get(relation.arg1);
  const tail = entities.get(relation.arg2);
  return `${relation.relation_type}|${head ? entityKey(head) : relation.arg1}|${tail ? entityKey(tail) : relation.arg2}`;
}

/** Accepting the whole layer = replaying it onto the human layer as edits.
 * Entities come first so relations can reference fresh ids; arg references
 * are rewritten positionally by the server's id assignment order. */
export function acceptAllEdits(layer: AnnotationSetDto, human: AnnotationSetDto): EditDto[] {
  const edits: EditDto[] = [];
  const humanKeys = new Set(human.entities.map(entityKey));
  const humanRelationKeys = new Set(
    human.relations.map((r) => relationKey(r, new Map(human.entities.map((e) => [e.ann_id, e])))),
  );
  const layerEntities = new Map(layer.entities.map((e) => [e.ann_id, e]));
  let nextId = maxNumericId(human) + 1;
  const assigned = new Map<string, string>();
  for (const entity of layer.entities) {
    if (humanKeys.has(entityKey(entity))) {
      const existing = human.entities.find((e) => entityKey(e) === entityKey(entity))!;
      assigned.set(entity.ann_id, existing.ann_id);
      continue;
    }
    edits.push({
      op: "add_entity",
      entity_type: entity.entity_type,
      para_id: entity.para_id,
      span: entity.span,
      surface: entity.surface,
    });
    assigned.set(entity.ann_id, `T${nextId}`);
    nextId += 1;
  }
  for (const relation of layer.relations) {
    if (humanRelationKeys.has(relationKey(relation, layerEntities))) continue;
    const arg1 = assigned.get(relation.arg1);
    const arg2 = assigned.get(relation.arg2);
    if (arg1 && arg2) {
      edits.push({ op: "add_relation", relation_type: relation.relation_type, arg1, arg2 });
    }
  }
  return edits;
}

function maxNumericId(set: AnnotationSetDto): number {
  let max = 0;
  for (const entity of set.entities) {
    const n = parseInt(entity.ann_id.replace(/\D+/g, ""), 10);
    if (!Number.isNaN(n)) max = Math.max(max, n);
  }
  return max;
}
