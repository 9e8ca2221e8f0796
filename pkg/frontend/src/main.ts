/** App shell: connect bar, project/document pickers and the three views
 * (Annotate, Review, Ask). All state round-trips through the /v1 API. */

import { ApiClient, ApiError } from "./api.js";
import { isAllowed, relationOptions } from "./allowed.js";
import {
  computeSegments,
  innermost,
  selectionToSpan,
  surfaceMismatches,
  trimSpan,
} from "./highlights.js";
import { renderSubgraph } from "./graphview.js";
import { acceptAllEdits, pendingItems } from "./review.js";
import { renderTranscript } from "./transcript.js";
import type {
  AnnotationSetDto,
  AnswerDto,
  EntityDto,
  ParagraphDto,
  SchemaDto,
} from "./types.js";

interface AppState {
  client: ApiClient | null;
  projectId: string | null;
  privilege: string | null;
  docId: string | null;
  paragraphs: ParagraphDto[];
  schema: SchemaDto;
  annotations: AnnotationSetDto | null;
  reviewLayer: "model" | "regex";
  pendingRelation: string | null; // first clicked entity
  transcript: string;
  lastAnswer: AnswerDto | null;
}

const state: AppState = {
  client: null,
  projectId: null,
  privilege: null,
  docId: null,
  paragraphs: [],
  schema: { entities: [], rules: [] },
  annotations: null,
  reviewLayer: "model",
  pendingRelation: null,
  transcript: "",
  lastAnswer: null,
};

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

function setStatus(message: string, isError = false): void {
  const bar = el<HTMLDivElement>("status");
  bar.textContent = message;
  bar.className = isError ? "status error" : "status";
}

function showApiError(error: unknown): void {
  if (error instanceof ApiError) {
    if (error.status === 403) {
      setStatus("read-only: your privilege does not allow this action", true);
      return;
    }
    const details =
      Array.isArray(error.details) && error.details.length
        ? `: ${(error.details as { message?: string }[])
            .map((d) => d.message ?? JSON.stringify(d))
            .join("; ")}`
        : "";
    setStatus(`${error.code} (${error.status}) ${error.message}${details}`, true);
  } else {
    setStatus(String(error), true);
  }
}

async function connect(): Promise<void> {
  const base = el<HTMLInputElement>("base-url").value.replace(/\/$/, "");
  const token = el<HTMLInputElement>("token").value.trim();
  state.client = new ApiClient(base, token);
  try {
    const { projects } = await state.client.listProjects();
    const picker = el<HTMLSelectElement>("project");
    picker.innerHTML = "";
    for (const project of projects) {
      const option = document.createElement("option");
      option.value = project.project_id;
      option.textContent = `${project.name} (${project.privilege})`;
      option.dataset.privilege = project.privilege;
      picker.appendChild(option);
    }
    setStatus(`connected: ${projects.length} project(s)`);
    if (projects.length) {
      picker.value = projects[0]!.project_id;
      await selectProject();
    }
  } catch (error) {
    showApiError(error);
  }
}

async function selectProject(): Promise<void> {
  if (!state.client) return;
  const picker = el<HTMLSelectElement>("project");
  state.projectId = picker.value || null;
  state.privilege = picker.selectedOptions[0]?.dataset.privilege ?? null;
  if (!state.projectId) return;
  el<HTMLDivElement>("readonly-banner").hidden = state.privilege !== "viewer";
  try {
    state.schema = await state.client.getSchema(state.projectId);
    const { documents } = await state.client.listDocuments(state.projectId);
    const docPicker = el<HTMLSelectElement>("document");
    docPicker.innerHTML = "";
    for (const doc of documents) {
      const option = document.createElement("option");
      option.value = doc.doc_id;
      option.textContent = doc.title || doc.doc_id;
      docPicker.appendChild(option);
    }
    if (documents.length) {
      docPicker.value = documents[0]!.doc_id;
      await selectDocument();
    }
  } catch (error) {
    showApiError(error);
  }
}

async function selectDocument(): Promise<void> {
  if (!state.client || !state.projectId) return;
  state.docId = el<HTMLSelectElement>("document").value || null;
  if (!state.docId) return;
  try {
    const { paragraphs } = await state.client.getParagraphs(state.projectId, state.docId);
    state.paragraphs = paragraphs;
    state.annotations = await state.client.getAnnotations(
      state.projectId,
      state.docId,
      "human",
    );
    renderAnnotateView();
    await renderReviewView();
  } catch (error) {
    showApiError(error);
  }
}

// -- annotate view ----------------------------------------------------------

const PROVENANCE_CLASS: Record<string, string> = {
  human: "prov-human",
  regex: "prov-regex",
  model: "prov-model",
};

function renderAnnotateView(): void {
  const host = el<HTMLDivElement>("paragraphs");
  host.innerHTML = "";
  const typePicker = el<HTMLSelectElement>("entity-type");
  typePicker.innerHTML = "";
  for (const entityType of state.schema.entities) {
    const option = document.createElement("option");
    option.value = entityType;
    option.textContent = entityType;
    typePicker.appendChild(option);
  }
  if (!state.annotations) return;
  const byId = new Map(state.annotations.entities.map((e) => [e.ann_id, e]));

  for (const paragraph of state.paragraphs) {
    const entities = state.annotations.entities.filter(
      (e) => e.para_id === paragraph.para_id,
    );
    const bad = surfaceMismatches(paragraph.text, entities);
    if (bad.length) {
      setStatus(`surface mismatch for ${bad.join(", ")} (stale view?)`, true);
      continue;
    }
    const block = document.createElement("div");
    block.className = "paragraph";
    block.dataset.paraId = paragraph.para_id;
    const segments = computeSegments(paragraph.text, entities);
    segments.forEach((segment, index) => {
      const span = document.createElement("span");
      span.textContent = segment.text;
      span.dataset.segment = String(index);
      const target = innermost(segment);
      if (target) {
        const entity = byId.get(target)!;
        span.className = `entity ${PROVENANCE_CLASS[entity.provenance] ?? ""}`;
        span.title = `${entity.ann_id} ${entity.entity_type} (${entity.provenance})`;
        span.dataset.annId = target;
        span.style.textDecorationThickness = `${segment.covering.length * 2}px`;
        span.addEventListener("click", (event) => {
          event.stopPropagation();
          void entityClicked(entity);
        });
      }
      block.appendChild(span);
    });
    block.addEventListener("mouseup", () => void selectionMade(paragraph, segments, block));
    host.appendChild(block);
  }
  renderEntityList();
}

function renderEntityList(): void {
  const list = el<HTMLUListElement>("entity-list");
  list.innerHTML = "";
  if (!state.annotations) return;
  for (const entity of state.annotations.entities) {
    const item = document.createElement("li");
    item.textContent = `${entity.ann_id} ${entity.entity_type} "${entity.surface}" `;
    const remove = document.createElement("button");
    remove.textContent = "delete";
    remove.addEventListener("click", () => void deleteAnnotation(entity.ann_id));
    item.appendChild(remove);
    list.appendChild(item);
  }
  for (const relation of state.annotations.relations) {
    const item = document.createElement("li");
    item.textContent = `${relation.ann_id} ${relation.relation_type} ${relation.arg1}->${relation.arg2} `;
    const remove = document.createElement("button");
    remove.textContent = "delete";
    remove.addEventListener("click", () => void deleteAnnotation(relation.ann_id));
    item.appendChild(remove);
    list.appendChild(item);
  }
}

async function selectionMade(
  paragraph: ParagraphDto,
  segments: ReturnType<typeof computeSegments>,
  block: HTMLDivElement,
): Promise<void> {
  const selection = window.getSelection();
  if (!selection || selection.isCollapsed || !state.client) return;
  const range = selection.getRangeAt(0);
  const anchorSpan = closestSegment(range.startContainer, block);
  const focusSpan = closestSegment(range.endContainer, block);
  if (anchorSpan === null || focusSpan === null) return;
  const raw = selectionToSpan(
    segments,
    { segment: anchorSpan, offset: range.startOffset },
    { segment: focusSpan, offset: range.endOffset },
  );
  selection.removeAllRanges();
  if (!raw) return;
  const span = trimSpan(paragraph.text, raw);
  if (!span) return;
  const entityType = el<HTMLSelectElement>("entity-type").value;
  if (!entityType) {
    setStatus("define schema entity types first", true);
    return;
  }
  await applyEdits([
    {
      op: "add_entity",
      entity_type: entityType,
      para_id: paragraph.para_id,
      span,
      surface: paragraph.text.slice(span[0], span[1]),
    },
  ]);
}

function closestSegment(node: Node, block: HTMLDivElement): number | null {
  let current: Node | null = node;
  while (current && current !== block) {
    if (current instanceof HTMLElement && current.dataset.segment) {
      return Number(current.dataset.segment);
    }
    current = current.parentNode;
  }
  return null;
}

async function entityClicked(entity: EntityDto): Promise<void> {
  if (!state.annotations) return;
  if (state.pendingRelation === null) {
    state.pendingRelation = entity.ann_id;
    setStatus(`relation: ${entity.ann_id} selected, click the tail entity`);
    return;
  }
  const headId = state.pendingRelation;
  state.pendingRelation = null;
  if (headId === entity.ann_id) {
    setStatus("relation cancelled");
    return;
  }
  const head = state.annotations.entities.find((e) => e.ann_id === headId);
  if (!head) return;
  const options = relationOptions(state.schema, head.entity_type, entity.entity_type);
  const picker = el<HTMLSelectElement>("relation-type");
  picker.innerHTML = "";
  for (const name of options) {
    const option = document.createElement("option");
    option.value = name;
    option.textContent = name;
    picker.appendChild(option);
  }
  if (!options.length) {
    setStatus(
      `no relation allows (${head.entity_type} -> ${entity.entity_type}); pick other entities`,
      true,
    );
    return;
  }
  const relation = options.length === 1 ? options[0]! : picker.value;
  if (!isAllowed(state.schema, head.entity_type, relation, entity.entity_type)) return;
  await applyEdits([
    { op: "add_relation", relation_type: relation, arg1: headId, arg2: entity.ann_id },
  ]);
}

async function deleteAnnotation(annId: string): Promise<void> {
  await applyEdits([{ op: "delete", ann_id: annId }]);
}

async function applyEdits(
  edits: Parameters<ApiClient["revise"]>[2],
  baseLayer: "human" | "model" | "regex" = "human",
): Promise<void> {
  if (!state.client || !state.projectId || !state.docId) return;
  try {
    state.annotations = await state.client.revise(
      state.projectId,
      state.docId,
      edits,
      baseLayer,
    );
    setStatus(`saved (${edits.length} edit(s))`);
    renderAnnotateView();
    await renderReviewView();
  } catch (error) {
    showApiError(error);
  }
}

// -- review view --------------------------------------------------------------

async function renderReviewView(): Promise<void> {
  if (!state.client || !state.projectId || !state.docId || !state.annotations) return;
  const layer = await state.client.getAnnotations(
    state.projectId,
    state.docId,
    state.reviewLayer,
  );
  const items = pendingItems(layer, state.annotations);
  const list = el<HTMLUListElement>("pending-list");
  list.innerHTML = "";
  for (const item of items) {
    const row = document.createElement("li");
    row.textContent = `[${item.kind}] ${item.label} ${item.detail} `;
    list.appendChild(row);
  }
  el<HTMLButtonElement>("accept-all").onclick = () => {
    void applyEdits(acceptAllEdits(layer, state.annotations!), "human");
  };
  try {
    const evalResult = await state.client.evaluate(
      state.projectId,
      state.reviewLayer,
      "human",
      [state.docId],
    );
    el<HTMLDivElement>("eval-panel").textContent =
      `P=${evalResult.precision.toFixed(4)} R=${evalResult.recall.toFixed(4)} ` +
      `F1=${evalResult.micro_f1.toFixed(4)} (support ${evalResult.support})`;
  } catch {
    el<HTMLDivElement>("eval-panel").textContent = "no evaluation available";
  }
}

// -- ask view ------------------------------------------------------------------

async function askQuestion(): Promise<void> {
  if (!state.client || !state.projectId) return;
  const text = el<HTMLInputElement>("question").value.trim();
  if (!text) return;
  const modelId = el<HTMLInputElement>("model-id").value.trim() || "mock";
  try {
    const answer = await state.client.ask(state.projectId, text, modelId);
    state.lastAnswer = answer;
    state.transcript = renderTranscript(text, answer);
    el<HTMLPreElement>("transcript").textContent = state.transcript;
    const contextHost = el<HTMLDivElement>("contexts");
    contextHost.innerHTML = "";
    const paragraphText = new Map(
      answer.subgraph.nodes
        .filter((n) => n.kind === "PARAGRAPH")
        .map((n) => [n.node_id, String(n.props["text"] ?? "")]),
    );
    answer.contexts.forEach((hit, i) => {
      const box = document.createElement("div");
      box.className = "context";
      box.dataset.paraId = hit.para_id;
      const title = document.createElement("h4");
      title.textContent = `Context ${i + 1} (${hit.para_id}, score ${hit.score.toFixed(4)})`;
      const body = document.createElement("p");
      body.textContent = paragraphText.get(hit.para_id) ?? "";
      const perContext = document.createElement("p");
      perContext.className = "context-answer";
      perContext.textContent = answer.per_context[i]?.answer ?? "";
      box.append(title, body, perContext);
      contextHost.appendChild(box);
    });
    const svg = el<HTMLElement>("subgraph") as unknown as SVGSVGElement;
    renderSubgraph(svg, answer.subgraph, {
      onEntityClick: (node) => {
        const sentId = String(node.props["sent_id"] ?? "");
        highlightSentence(sentId);
      },
    });
    setStatus(`answered with ${answer.contexts.length} context(s)`);
  } catch (error) {
    showApiError(error);
  }
}

function highlightSentence(sentId: string): void {
  if (!state.lastAnswer) return;
  const sentence = state.lastAnswer.subgraph.nodes.find((n) => n.node_id === sentId);
  if (!sentence) return;
  const paraId = String(sentence.props["para_id"] ?? "");
  const start = Number(sentence.props["start"] ?? 0);
  const end = Number(sentence.props["end"] ?? 0);
  for (const box of document.querySelectorAll<HTMLDivElement>(".context")) {
    box.classList.remove("highlight");
    const body = box.querySelector("p");
    if (box.dataset.paraId === paraId && body) {
      box.classList.add("highlight");
      const text = body.textContent ?? "";
      body.innerHTML = "";
      body.append(
        document.createTextNode(text.slice(0, start)),
        Object.assign(document.createElement("mark"), {
          textContent: text.slice(start, end),
        }),
        document.createTextNode(text.slice(end)),
      );
    }
  }
}

// -- wiring -----------------------------------------------------------------------

function switchTab(name: string): void {
  for (const tab of document.querySelectorAll<HTMLElement>(".tab")) {
    tab.hidden = tab.id !== `tab-${name}`;
  }
  for (const button of document.querySelectorAll<HTMLButtonElement>("nav button")) {
    button.classList.toggle("active", button.dataset.tab === name);
  }
}

export function init(): void {
  el<HTMLButtonElement>("connect").addEventListener("click", () => void connect());
  el<HTMLSelectElement>("project").addEventListener("change", () => void selectProject());
  el<HTMLSelectElement>("document").addEventListener("change", () => void selectDocument());
  el<HTMLButtonElement>("ask").addEventListener("click", () => void askQuestion());
  el<HTMLSelectElement>("review-layer").addEventListener("change", (event) => {
    state.reviewLayer = (event.target as HTMLSelectElement).value as "model" | "regex";
    void renderReviewView();
  });
  for (const button of document.querySelectorAll<HTMLButtonElement>("nav button")) {
    button.addEventListener("click", () => switchTab(button.dataset.tab!));
  }
  switchTab("annotate");
}

if (typeof document !== "undefined" && document.getElementById("connect")) {
  init();
}
